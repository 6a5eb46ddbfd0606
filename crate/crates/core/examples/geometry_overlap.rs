//! Image-space overlap measures and exact BEV footprint intersection.

use siamtrack::geometry::{
    bev_footprint, footprint_overlap_gradient, ioa, iou, occlusion_fraction, polygon_intersection_area, BBox2D, Box3D,
};

fn main() -> siamtrack::Result<()> {
    // Normalized (cx, cy, h, w) boxes.
    let a = BBox2D::new(0.40, 0.50, 0.30, 0.10)?;
    let b = BBox2D::new(0.45, 0.50, 0.30, 0.10)?;
    let c = BBox2D::new(0.48, 0.55, 0.20, 0.10)?;
    println!("iou(a, b)        = {:.4}", iou(&a, &b));
    println!("ioa(a, b)        = {:.4}", ioa(&a, &b));
    println!("occlusion of a   = {:.4}", occlusion_fraction(&a, &[b, c]));

    // Two cars seen from above, one rotated by 30 degrees.
    let car = Box3D::new([0.0, 0.8, 20.0], [1.5, 1.6, 3.9], 0.0)?;
    let other = Box3D::new([1.2, 0.8, 21.5], [1.5, 1.6, 3.9], 30f64.to_radians())?;
    let (pa, pb) = (bev_footprint(&car), bev_footprint(&other));
    let area = polygon_intersection_area(&pa, &pb);
    println!("footprint areas  = {:.3} / {:.3} m2", pa.area(), pb.area());
    println!("overlap          = {area:.4} m2");
    let g = footprint_overlap_gradient(&car, &other);
    println!("d overlap / d [cx, cz, w, l, yaw] of the first car: {:.3?}", g.d_first);
    Ok(())
}
