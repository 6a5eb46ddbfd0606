//! Push two overlapping BEV predictions apart with the overlap penalty and
//! inspect the balance of gradients at the result.

use siamtrack::bev::{
    intersection_penalty, pred_loss, refine, stationarity_check, BevLearnables, ParamMask, RefineConfig, Scene3D,
};
use siamtrack::geometry::Box3D;

fn main() -> siamtrack::Result<()> {
    let size = [1.5, 1.6, 3.9];
    let gt = [
        Box3D::new([0.0, 0.8, 20.0], size, 0.0)?,
        Box3D::new([1.56, 0.8, 23.86], size, 0.0)?,
    ];
    let pred = [
        Box3D::new([0.3, 0.8, 20.4], size, 0.05)?,
        Box3D::new([1.1, 0.8, 23.3], size, -0.05)?,
    ];
    let mut scene = Scene3D::from_parallel(&["car", "car"], &pred, &gt)?;
    let mut learn = BevLearnables::new(&["car"]);
    learn.beta.insert("car".into(), 4.0);
    let mask = ParamMask([true, false, true, false, false, false, false]);

    println!(
        "before: pred_loss {:.4}  overlap penalty {:.4} m2",
        pred_loss(&scene, &learn)?,
        intersection_penalty(&scene, &learn)
    );
    let trace = refine(
        &mut scene,
        &learn,
        &RefineConfig {
            mask,
            max_steps: 400,
            ..RefineConfig::default()
        },
    )?;
    println!(
        "after {} steps: pred_loss {:.4}  overlap penalty {:.2e} m2",
        trace.steps.len() - 1,
        pred_loss(&scene, &learn)?,
        intersection_penalty(&scene, &learn)
    );
    let report = stationarity_check(&scene, &learn, 1e-6, mask)?;
    for (k, (p, q)) in report.pred_grad.iter().zip(&report.penalty_grad).enumerate() {
        println!("object {k}: d pred / d(cx, cz) {:+.4} {:+.4}   d penalty {:+.4} {:+.4}", p[0], p[2], q[0], q[2]);
    }
    println!("residual norm {:.2e}", report.residual_norm);
    Ok(())
}
