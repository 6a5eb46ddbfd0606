//! Box and polygon arithmetic.
//!
//! Image-space boxes are centre based and normalized by the image size.
//! BEV footprints live in the x-z ground plane, measured in metres.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Centre-based image box in normalized coordinates.
///
/// `cx`, `cy` are fractions of image width and height; `h`, `w` are the box
/// height and width as fractions of the image height and width. Only
/// positivity and finiteness are enforced, so the same type also carries
/// unnormalized values when a caller wants plain units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox2D {
    cx: f64,
    cy: f64,
    h: f64,
    w: f64,
}

impl BBox2D {
    pub fn new(cx: f64, cy: f64, h: f64, w: f64) -> Result<Self> {
        if !(cx.is_finite() && cy.is_finite() && h.is_finite() && w.is_finite()) {
            return Err(invalid("box coordinates must be finite"));
        }
        if h <= 0.0 || w <= 0.0 {
            return Err(invalid(format!("box extent must be positive (h={h}, w={w})")));
        }
        Ok(Self { cx, cy, h, w })
    }

    /// Box from pixel-space `left, top, width, height` and the image size.
    pub fn from_ltwh(
        left: f64,
        top: f64,
        width: f64,
        height: f64,
        image_width: f64,
        image_height: f64,
    ) -> Result<Self> {
        if image_width <= 0.0 || image_height <= 0.0 {
            return Err(invalid("image size must be positive"));
        }
        Self::new(
            (left + 0.5 * width) / image_width,
            (top + 0.5 * height) / image_height,
            height / image_height,
            width / image_width,
        )
    }

    /// Pixel-space `[left, top, width, height]`.
    pub fn to_ltwh(&self, image_width: f64, image_height: f64) -> [f64; 4] {
        let width = self.w * image_width;
        let height = self.h * image_height;
        [
            self.cx * image_width - 0.5 * width,
            self.cy * image_height - 0.5 * height,
            width,
            height,
        ]
    }

    #[inline]
    pub fn cx(&self) -> f64 {
        self.cx
    }
    #[inline]
    pub fn cy(&self) -> f64 {
        self.cy
    }
    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }
    #[inline]
    pub fn w(&self) -> f64 {
        self.w
    }

    #[inline]
    pub fn left(&self) -> f64 {
        self.cx - 0.5 * self.w
    }
    #[inline]
    pub fn right(&self) -> f64 {
        self.cx + 0.5 * self.w
    }
    #[inline]
    pub fn top(&self) -> f64 {
        self.cy - 0.5 * self.h
    }
    #[inline]
    pub fn bottom(&self) -> f64 {
        self.cy + 0.5 * self.h
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// `(cx, cy, h, w)` in the order used by motion deltas.
    pub fn params(&self) -> [f64; 4] {
        [self.cx, self.cy, self.h, self.w]
    }

    /// Box shifted by `(dcx, dcy, dh, dw)`; extents are floored at `min_extent`.
    pub fn shifted(&self, delta: [f64; 4], min_extent: f64) -> Self {
        Self {
            cx: self.cx + delta[0],
            cy: self.cy + delta[1],
            h: (self.h + delta[2]).max(min_extent),
            w: (self.w + delta[3]).max(min_extent),
        }
    }
}

/// Overlap length of two intervals. Containment returns the inner extent
/// itself so that nested boxes give exact ratios.
fn overlap_1d(a_lo: f64, a_hi: f64, a_len: f64, b_lo: f64, b_hi: f64, b_len: f64) -> f64 {
    if b_lo <= a_lo && a_hi <= b_hi {
        a_len
    } else if a_lo <= b_lo && b_hi <= a_hi {
        b_len
    } else {
        a_hi.min(b_hi) - a_lo.max(b_lo)
    }
}

/// Area of `a ∩ b`.
pub fn intersection_area(a: &BBox2D, b: &BBox2D) -> f64 {
    let iw = overlap_1d(a.left(), a.right(), a.w, b.left(), b.right(), b.w);
    let ih = overlap_1d(a.top(), a.bottom(), a.h, b.top(), b.bottom(), b.h);
    if iw <= 0.0 || ih <= 0.0 {
        0.0
    } else {
        iw * ih
    }
}

pub fn iou(a: &BBox2D, b: &BBox2D) -> f64 {
    let inter = intersection_area(a, b);
    if inter == 0.0 {
        return 0.0;
    }
    let (area_a, area_b) = (a.area(), b.area());
    // The floor keeps iou <= ioa under rounding.
    let union = (area_a + area_b - inter).max(area_a.max(area_b));
    (inter / union).min(1.0)
}

pub fn iou_distance(a: &BBox2D, b: &BBox2D) -> f64 {
    1.0 - iou(a, b)
}

/// Fraction of `a` covered by `b`.
pub fn ioa(a: &BBox2D, b: &BBox2D) -> f64 {
    (intersection_area(a, b) / a.area()).min(1.0)
}

/// Largest fraction of `det` covered by any single box in `others`.
///
/// `others` must not contain `det` itself. An empty list means fully visible.
pub fn occlusion_fraction(det: &BBox2D, others: &[BBox2D]) -> f64 {
    others.iter().map(|o| ioa(det, o)).fold(0.0, f64::max)
}

/// Wrap an angle into `[-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    if (-PI..=PI).contains(&theta) {
        return theta;
    }
    let wrapped = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if wrapped < -PI {
        wrapped + 2.0 * PI
    } else {
        wrapped
    }
}

/// 3D world box: centre `(Cx, Cy, Cz)`, size `(h, w, l)` in metres and yaw
/// about the vertical axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3D {
    pub centre: [f64; 3],
    pub size: [f64; 3],
    pub yaw: f64,
}

impl Box3D {
    pub fn new(centre: [f64; 3], size: [f64; 3], yaw: f64) -> Result<Self> {
        if centre.iter().chain(size.iter()).any(|v| !v.is_finite()) || !yaw.is_finite() {
            return Err(invalid("3D box parameters must be finite"));
        }
        if size.iter().any(|&s| s <= 0.0) {
            return Err(invalid(format!("3D box size must be positive, got {size:?}")));
        }
        Ok(Self {
            centre,
            size,
            yaw: wrap_angle(yaw),
        })
    }

    /// Parameters in loss order: `[Cx, Cy, Cz, h, w, l, θ]`.
    pub fn params(&self) -> [f64; 7] {
        let [cx, cy, cz] = self.centre;
        let [h, w, l] = self.size;
        [cx, cy, cz, h, w, l, self.yaw]
    }

    /// Inverse of [`Box3D::params`]. Sizes are not validated, so this can be
    /// used inside optimizers that step through arbitrary parameter values.
    pub fn from_params(p: [f64; 7]) -> Self {
        Self {
            centre: [p[0], p[1], p[2]],
            size: [p[3], p[4], p[5]],
            yaw: p[6],
        }
    }

    pub fn height(&self) -> f64 {
        self.size[0]
    }
    pub fn width(&self) -> f64 {
        self.size[1]
    }
    pub fn length(&self) -> f64 {
        self.size[2]
    }
}

pub type Point2 = [f64; 2];

#[inline]
fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Signed shoelace area; positive for counter-clockwise order.
pub fn signed_area(vertices: &[Point2]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (i, a) in vertices.iter().enumerate() {
        let b = vertices[(i + 1) % vertices.len()];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * acc
}

/// Convex polygon in the x-z plane, vertices in counter-clockwise order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Accepts either winding; clockwise input is reversed.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(invalid("a polygon needs at least 3 vertices"));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("polygon vertices must be finite"));
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(invalid("polygon has zero area"));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        let scale = vertices
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        let tol = -1e-12 * scale * scale;
        for i in 0..n {
            if cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) < tol {
                return Err(invalid("polygon is not convex"));
            }
        }
        // A star polygon has positive turns everywhere but winds more than once.
        let mut winding = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let e1 = [b[0] - a[0], b[1] - a[1]];
            let e2 = [c[0] - b[0], c[1] - b[1]];
            winding += (e1[0] * e2[1] - e1[1] * e2[0]).atan2(e1[0] * e2[0] + e1[1] * e2[1]);
        }
        if (winding - 2.0 * PI).abs() > 1e-6 {
            return Err(invalid("polygon is self-intersecting"));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Inclusive point-in-polygon test.
    pub fn contains(&self, p: Point2) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0.0)
    }
}

/// Rectangle of extent `w` (local x) by `l` (local z) centred at `(Cx, Cz)`
/// and rotated counter-clockwise by the yaw in the x-z plane.
pub fn bev_footprint(b: &Box3D) -> ConvexPolygon {
    ConvexPolygon {
        vertices: footprint_vertices(b.centre[0], b.centre[2], b.width(), b.length(), b.yaw).to_vec(),
    }
}

fn footprint_vertices(cx: f64, cz: f64, w: f64, l: f64, yaw: f64) -> [Point2; 4] {
    let (s, c) = yaw.sin_cos();
    let (hw, hl) = (0.5 * w, 0.5 * l);
    [(-hw, -hl), (hw, -hl), (hw, hl), (-hw, hl)].map(|(u, v)| [cx + c * u - s * v, cz + s * u + c * v])
}

/// Vertices of `subject ∩ clip`: `subject` clipped against each half-plane of
/// `clip`. Both inputs must be convex and counter-clockwise. Returns fewer
/// than 3 vertices when the intersection is empty or degenerate.
pub fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut output: Vec<Point2> = subject.to_vec();
    let mut input = Vec::with_capacity(subject.len() + clip.len());
    let m = clip.len();
    for i in 0..m {
        if output.len() < 3 {
            output.clear();
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % m];
        std::mem::swap(&mut input, &mut output);
        output.clear();
        let n = input.len();
        for j in 0..n {
            let cur = input[j];
            let next = input[(j + 1) % n];
            let dc = cross(a, b, cur);
            let dn = cross(a, b, next);
            if dc >= 0.0 {
                output.push(cur);
                if dn < 0.0 {
                    output.push(segment_point(cur, next, dc, dn));
                }
            } else if dn >= 0.0 {
                output.push(segment_point(cur, next, dc, dn));
            }
        }
    }
    output
}

#[inline]
fn segment_point(p: Point2, q: Point2, dp: f64, dq: f64) -> Point2 {
    let t = dp / (dp - dq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

/// Area of `p ∩ q` in m²; 0 for disjoint or degenerate overlaps.
pub fn polygon_intersection_area(p: &ConvexPolygon, q: &ConvexPolygon) -> f64 {
    signed_area(&clip_convex(&p.vertices, &q.vertices)).max(0.0)
}

/// Gradient of the footprint overlap area with respect to the BEV
/// parameters of each box, ordered `[Cx, Cz, w, l, yaw]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapGradient {
    pub area: f64,
    pub d_first: [f64; 5],
    pub d_second: [f64; 5],
}

/// Overlap area of two footprints and its exact gradient.
///
/// The derivative of the area with respect to a parameter of one rectangle
/// is the flux of that rectangle's boundary velocity through the part of its
/// boundary that bounds the intersection. Each rectangle parameter moves
/// boundary points affinely, so a midpoint rule is exact on every edge.
pub fn footprint_overlap_gradient(a: &Box3D, b: &Box3D) -> OverlapGradient {
    let pa = footprint_vertices(a.centre[0], a.centre[2], a.width(), a.length(), a.yaw);
    let pb = footprint_vertices(b.centre[0], b.centre[2], b.width(), b.length(), b.yaw);
    let poly = clip_convex(&pa, &pb);
    let area = signed_area(&poly);
    let mut out = OverlapGradient {
        area: area.max(0.0),
        d_first: [0.0; 5],
        d_second: [0.0; 5],
    };
    if poly.len() < 3 || area <= 0.0 {
        out.area = 0.0;
        return out;
    }
    let n = poly.len();
    for k in 0..n {
        let p = poly[k];
        let q = poly[(k + 1) % n];
        let mid = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
        // Outward normal scaled by edge length for a CCW polygon.
        let normal = [q[1] - p[1], p[0] - q[0]];
        if normal[0] == 0.0 && normal[1] == 0.0 {
            continue;
        }
        let (da, db) = (edge_line_distance(&pa, mid), edge_line_distance(&pb, mid));
        let (owner, grad) = if da <= db {
            (a, &mut out.d_first)
        } else {
            (b, &mut out.d_second)
        };
        let velocities = boundary_velocities(owner, mid);
        for (g, v) in grad.iter_mut().zip(velocities.iter()) {
            *g += normal[0] * v[0] + normal[1] * v[1];
        }
    }
    out
}

/// Distance from `p` to the closest supporting edge line of `poly`.
fn edge_line_distance(poly: &[Point2; 4], p: Point2) -> f64 {
    (0..4)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % 4];
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            (cross(a, b, p) / len).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Velocity of a boundary point `x` under each footprint parameter
/// `[Cx, Cz, w, l, yaw]`.
fn boundary_velocities(b: &Box3D, x: Point2) -> [Point2; 5] {
    let (s, c) = b.yaw.sin_cos();
    let rel = [x[0] - b.centre[0], x[1] - b.centre[2]];
    // Local coordinates u = Rᵀ (x - c).
    let u0 = c * rel[0] + s * rel[1];
    let u1 = -s * rel[0] + c * rel[1];
    let dw = [c * u0 / b.width(), s * u0 / b.width()];
    let dl = [-s * u1 / b.length(), c * u1 / b.length()];
    let dyaw = [-rel[1], rel[0]];
    [[1.0, 0.0], [0.0, 1.0], dw, dl, dyaw]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bx(cx: f64, cy: f64, w: f64, h: f64) -> BBox2D {
        BBox2D::new(cx, cy, h, w).unwrap()
    }

    fn square(cx: f64, cz: f64, side: f64) -> ConvexPolygon {
        let h = side / 2.0;
        ConvexPolygon::new(vec![
            [cx - h, cz - h],
            [cx + h, cz - h],
            [cx + h, cz + h],
            [cx - h, cz + h],
        ])
        .unwrap()
    }

    #[test]
    fn iou_reference_values() {
        let a = bx(0.5, 0.5, 0.2, 0.3);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &bx(0.9, 0.9, 0.1, 0.1)), 0.0);
        let p = bx(1.0, 1.0, 2.0, 2.0);
        let q = bx(2.0, 1.0, 2.0, 2.0);
        assert_relative_eq!(iou(&p, &q), 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(iou_distance(&p, &q), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(iou_distance(&a, &a), 0.0);
    }

    #[test]
    fn ioa_is_asymmetric() {
        let inner = bx(0.5, 0.5, 0.1, 0.1);
        let outer = bx(0.5, 0.5, 0.4, 0.4);
        assert_eq!(ioa(&inner, &outer), 1.0);
        assert_relative_eq!(ioa(&outer, &inner), 1.0 / 16.0, epsilon = 1e-12);
        let half = bx(0.55, 0.5, 0.1, 0.1);
        assert_relative_eq!(ioa(&inner, &half), 0.5, epsilon = 1e-12);
        assert_eq!(ioa(&inner, &bx(0.1, 0.1, 0.05, 0.05)), 0.0);
    }

    #[test]
    fn occlusion_fraction_takes_max() {
        let det = bx(0.5, 0.5, 0.2, 0.2);
        assert_eq!(occlusion_fraction(&det, &[]), 0.0);
        assert_eq!(occlusion_fraction(&det, &[bx(0.5, 0.5, 0.5, 0.5)]), 1.0);
        // Covers 0.3 and 0.6 of the detection width respectively.
        let a = bx(0.4 + 0.03, 0.5, 0.06, 0.2);
        let b = bx(0.6 - 0.06, 0.5, 0.12, 0.2);
        assert_relative_eq!(occlusion_fraction(&det, &[a]), 0.3, epsilon = 1e-12);
        assert_relative_eq!(occlusion_fraction(&det, &[a, b]), 0.6, epsilon = 1e-12);
    }

    #[test]
    fn rejects_degenerate_boxes() {
        assert!(BBox2D::new(0.5, 0.5, 0.0, 0.1).is_err());
        assert!(BBox2D::new(0.5, f64::NAN, 0.1, 0.1).is_err());
        assert!(Box3D::new([0.0; 3], [1.0, -1.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn ltwh_round_trip() {
        let b = BBox2D::from_ltwh(10.0, 20.0, 30.0, 40.0, 640.0, 480.0).unwrap();
        let [l, t, w, h] = b.to_ltwh(640.0, 480.0);
        assert_relative_eq!(l, 10.0, epsilon = 1e-9);
        assert_relative_eq!(t, 20.0, epsilon = 1e-9);
        assert_relative_eq!(w, 30.0, epsilon = 1e-9);
        assert_relative_eq!(h, 40.0, epsilon = 1e-9);
    }

    #[test]
    fn yaw_wraps_into_range() {
        assert_relative_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_angle(-5.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-12);
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), -PI);
        let b = Box3D::new([0.0; 3], [1.0; 3], 7.0).unwrap();
        assert!((-PI..=PI).contains(&b.yaw));
    }

    #[test]
    fn footprint_axis_aligned() {
        let b = Box3D::new([0.0, 5.0, 0.0], [1.5, 2.0, 4.0], 0.0).unwrap();
        let fp = bev_footprint(&b);
        let mut xs: Vec<_> = fp.vertices().to_vec();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(xs, vec![[-1.0, -2.0], [-1.0, 2.0], [1.0, -2.0], [1.0, 2.0]]);
        assert!(fp.area() > 0.0);
    }

    #[test]
    fn footprint_quarter_turn_swaps_extents() {
        let b = Box3D::new([0.0; 3], [1.0, 2.0, 4.0], PI / 2.0).unwrap();
        let fp = bev_footprint(&b);
        let max_x = fp.vertices().iter().map(|v| v[0]).fold(f64::MIN, f64::max);
        let max_z = fp.vertices().iter().map(|v| v[1]).fold(f64::MIN, f64::max);
        assert_relative_eq!(max_x, 2.0, epsilon = 1e-12);
        assert_relative_eq!(max_z, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn footprint_half_turn_is_same_point_set() {
        let a = bev_footprint(&Box3D::new([1.0, 0.0, 2.0], [1.0, 2.0, 4.0], 0.0).unwrap());
        let b = bev_footprint(&Box3D::new([1.0, 0.0, 2.0], [1.0, 2.0, 4.0], PI).unwrap());
        for v in b.vertices() {
            assert!(a
                .vertices()
                .iter()
                .any(|u| (u[0] - v[0]).abs() < 1e-12 && (u[1] - v[1]).abs() < 1e-12));
        }
        assert_relative_eq!(polygon_intersection_area(&a, &b), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn offset_unit_squares() {
        let p = square(0.5, 0.5, 1.0);
        let q = square(1.0, 1.0, 1.0);
        assert_relative_eq!(polygon_intersection_area(&p, &q), 0.25, epsilon = 1e-12);
        assert_eq!(polygon_intersection_area(&p, &square(5.0, 5.0, 1.0)), 0.0);
    }

    #[test]
    fn rotated_square_overlap_matches_closed_form() {
        // Unit square vs itself rotated 45°: a regular octagon of area 2(√2 - 1).
        let p = square(0.0, 0.0, 1.0);
        let b = Box3D::new([0.0; 3], [1.0, 1.0, 1.0], PI / 4.0).unwrap();
        let q = bev_footprint(&b);
        assert_relative_eq!(
            polygon_intersection_area(&p, &q),
            2.0 * (2f64.sqrt() - 1.0),
            epsilon = 1e-12
        );
    }

    #[test]
    fn touching_polygons_have_zero_area() {
        let p = square(0.0, 0.0, 1.0);
        let q = square(1.0, 0.0, 1.0);
        assert_eq!(polygon_intersection_area(&p, &q), 0.0);
    }

    #[test]
    fn polygon_validation() {
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        // Non-convex dart.
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.5], [1.0, 2.0]]).is_err());
        // Clockwise input is reoriented.
        let cw = ConvexPolygon::new(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(cw.area() > 0.0);
    }

    #[test]
    fn overlap_gradient_matches_finite_differences() {
        let a = Box3D::new([0.3, 0.0, 0.1], [1.5, 1.8, 4.2], 0.35).unwrap();
        let b = Box3D::new([1.2, 0.0, 1.4], [1.5, 1.7, 3.9], -0.2).unwrap();
        let g = footprint_overlap_gradient(&a, &b);
        assert!(g.area > 0.0);
        let area = |a: &Box3D, b: &Box3D| polygon_intersection_area(&bev_footprint(a), &bev_footprint(b));
        assert_relative_eq!(g.area, area(&a, &b), epsilon = 1e-12);
        let h = 1e-6;
        let perturb = |bx: &Box3D, k: usize, d: f64| {
            let mut p = bx.params();
            let idx = [0, 2, 4, 5, 6][k];
            p[idx] += d;
            Box3D::from_params(p)
        };
        for k in 0..5 {
            let fd_a = (area(&perturb(&a, k, h), &b) - area(&perturb(&a, k, -h), &b)) / (2.0 * h);
            let fd_b = (area(&a, &perturb(&b, k, h)) - area(&a, &perturb(&b, k, -h))) / (2.0 * h);
            assert_relative_eq!(g.d_first[k], fd_a, epsilon = 1e-6, max_relative = 1e-6);
            assert_relative_eq!(g.d_second[k], fd_b, epsilon = 1e-6, max_relative = 1e-6);
        }
    }
}
