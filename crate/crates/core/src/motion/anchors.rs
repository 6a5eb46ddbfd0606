use crate::error::{invalid, Result};
use crate::geometry::BBox2D;

use super::tensor::Matrix;

/// Margin used to keep decoded deltas inside the open interval (-1, 1).
pub const DELTA_MARGIN: f64 = 1e-6;

/// Normalized per-frame change `(dx, dy, dh, dw)` of a box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaVector([f64; 4]);

impl DeltaVector {
    pub const ZERO: DeltaVector = DeltaVector([0.0; 4]);

    pub fn new(values: [f64; 4]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("delta components must be finite"));
        }
        if values.iter().any(|v| v.abs() >= 1.0) {
            return Err(invalid(format!("delta components must lie in (-1, 1), got {values:?}")));
        }
        Ok(Self(values))
    }

    /// Clamp arbitrary finite values into the open interval.
    pub fn saturating(values: [f64; 4]) -> Self {
        let lim = 1.0 - DELTA_MARGIN;
        Self(values.map(|v| if v.is_nan() { 0.0 } else { v.clamp(-lim, lim) }))
    }

    /// Change from `prev` to `next`, saturated into (-1, 1).
    pub fn between(prev: &BBox2D, next: &BBox2D) -> Self {
        let (a, b) = (prev.params(), next.params());
        Self::saturating([b[0] - a[0], b[1] - a[1], b[2] - a[2], b[3] - a[3]])
    }

    pub fn values(&self) -> [f64; 4] {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Ordered anchor positions for the per-parameter bin classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    values: Vec<f64>,
}

impl AnchorSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("an anchor set needs at least two anchors"));
        }
        if values.iter().any(|v| !(v.is_finite() && v.abs() < 1.0)) {
            return Err(invalid("anchors must lie in (-1, 1)"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("anchors must be strictly increasing"));
        }
        Ok(Self { values })
    }

    /// Signed bins covering motion in both directions.
    pub fn symmetric() -> Self {
        Self {
            values: vec![-0.8, -0.5, -0.1, 0.0, 0.1, 0.5, 0.8],
        }
    }

    /// The magnitude-only four-bin set `{0, 0.1, 0.5, 0.8}`.
    pub fn four_bin() -> Self {
        Self {
            values: vec![0.0, 0.1, 0.5, 0.8],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the nearest anchor; ties go to the lower index.
    pub fn nearest(&self, target: f64) -> usize {
        let mut best = 0;
        let mut best_dist = (target - self.values[0]).abs();
        for (i, &a) in self.values.iter().enumerate().skip(1) {
            let d = (target - a).abs();
            if d < best_dist {
                best = i;
                best_dist = d;
            }
        }
        best
    }
}

impl Default for AnchorSet {
    fn default() -> Self {
        Self::symmetric()
    }
}

/// One-hot bin targets and sparse residual targets, each `P x 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedTarget {
    pub c_true: Matrix,
    pub r_true: Matrix,
}

pub fn encode_target(delta: &DeltaVector, anchors: &AnchorSet) -> EncodedTarget {
    let p = anchors.len();
    let mut c_true = Matrix::zeros(p, 4);
    let mut r_true = Matrix::zeros(p, 4);
    for (j, &target) in delta.values().iter().enumerate() {
        let k = anchors.nearest(target);
        c_true.set(k, j, 1.0);
        r_true.set(k, j, target - anchors.values()[k]);
    }
    EncodedTarget { c_true, r_true }
}

/// Index of the largest entry in each column; ties go to the lower row.
pub fn column_argmax(m: &Matrix) -> [usize; 4] {
    let mut out = [0usize; 4];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut best = 0;
        for r in 1..m.rows() {
            if m.get(r, j) > m.get(best, j) {
                best = r;
            }
        }
        *slot = best;
    }
    out
}

/// Anchor at the predicted bin plus that bin's residual, per parameter.
pub fn decode(c_out: &Matrix, r_out: &Matrix, anchors: &AnchorSet) -> Result<DeltaVector> {
    if c_out.rows() != anchors.len() || r_out.rows() != anchors.len() || c_out.cols() != 4 || r_out.cols() != 4 {
        return Err(crate::Error::Shape(format!(
            "decode expects {}x4 outputs, got {}x{} and {}x{}",
            anchors.len(),
            c_out.rows(),
            c_out.cols(),
            r_out.rows(),
            r_out.cols()
        )));
    }
    let idx = column_argmax(c_out);
    let mut values = [0.0; 4];
    for j in 0..4 {
        values[j] = anchors.values()[idx[j]] + r_out.get(idx[j], j);
    }
    Ok(DeltaVector::saturating(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one_hot_at(anchors: &AnchorSet, bins: [usize; 4], residuals: [f64; 4]) -> (Matrix, Matrix) {
        let mut c = Matrix::zeros(anchors.len(), 4);
        let mut r = Matrix::zeros(anchors.len(), 4);
        for j in 0..4 {
            c.set(bins[j], j, 1.0);
            r.set(bins[j], j, residuals[j]);
        }
        (c, r)
    }

    #[test]
    fn anchor_validation() {
        assert!(AnchorSet::new(vec![0.0]).is_err());
        assert!(AnchorSet::new(vec![0.1, 0.0]).is_err());
        assert!(AnchorSet::new(vec![0.0, 1.0]).is_err());
        assert_eq!(AnchorSet::symmetric().len(), 7);
        assert_eq!(AnchorSet::four_bin().values(), &[0.0, 0.1, 0.5, 0.8]);
    }

    #[test]
    fn decode_adds_residual_to_selected_anchor() {
        let anchors = AnchorSet::four_bin();
        let (c, r) = one_hot_at(&anchors, [2, 0, 0, 0], [0.03, 0.0, 0.0, 0.0]);
        let d = decode(&c, &r, &anchors).unwrap();
        assert_relative_eq!(d.values()[0], 0.53, epsilon = 1e-15);
        assert_eq!(d.values()[1], 0.0);
    }

    #[test]
    fn decode_clamps_past_unit_interval() {
        let anchors = AnchorSet::four_bin();
        let (c, r) = one_hot_at(&anchors, [3, 3, 0, 0], [0.5, -0.1, 0.0, 0.0]);
        let d = decode(&c, &r, &anchors).unwrap();
        assert_eq!(d.values()[0], 1.0 - DELTA_MARGIN);
        assert_relative_eq!(d.values()[1], 0.7, epsilon = 1e-15);
    }

    #[test]
    fn decode_rejects_shape_mismatch() {
        let anchors = AnchorSet::four_bin();
        let c = Matrix::zeros(3, 4);
        assert!(decode(&c, &c, &anchors).is_err());
    }

    #[test]
    fn encode_nearest_bin_and_residual() {
        let anchors = AnchorSet::four_bin();
        let t = encode_target(&DeltaVector::new([0.09, 0.3, 0.0, 0.79]).unwrap(), &anchors);
        assert_eq!(t.c_true.column(0), vec![0.0, 1.0, 0.0, 0.0]);
        assert_relative_eq!(t.r_true.get(1, 0), -0.01, epsilon = 1e-15);
        // 0.3 sits midway between 0.1 and 0.5: the lower index wins.
        assert_eq!(t.c_true.column(1), vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(t.c_true.column(2), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(t.c_true.column(3), vec![0.0, 0.0, 0.0, 1.0]);
        // Residuals vanish away from the hot bin.
        assert_eq!(t.r_true.get(0, 0), 0.0);
    }

    #[test]
    fn exact_midpoint_tie_prefers_lower_index() {
        // 0.25 is exactly representable and equidistant from 0.0 and 0.5.
        let anchors = AnchorSet::new(vec![0.0, 0.5]).unwrap();
        assert_eq!(anchors.nearest(0.25), 0);
    }

    #[test]
    fn delta_domain() {
        assert!(DeltaVector::new([1.0, 0.0, 0.0, 0.0]).is_err());
        assert!(DeltaVector::new([f64::NAN, 0.0, 0.0, 0.0]).is_err());
        let d = DeltaVector::saturating([3.0, -3.0, 0.2, 0.0]);
        assert!(d.values().iter().all(|v| v.abs() < 1.0));
    }
}
