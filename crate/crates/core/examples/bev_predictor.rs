//! Train the 7-parameter BEV delta predictor on synthetic 3D tracks.

use siamtrack::bev::{bev_samples_from_track, BevDelta, BevLearnables, BevPredictor};
use siamtrack::eval::tracklets_3d;

fn main() -> siamtrack::Result<()> {
    let car = [1.5, 1.6, 3.9];
    let train = tracklets_3d(100, 30, car, 4)?;
    let test = tracklets_3d(10, 30, car, 5)?;
    let window = 8;
    let samples: Vec<_> = train.iter().flat_map(|t| bev_samples_from_track("car", t, window)).collect();

    let mut model = BevPredictor::new(32, BevLearnables::new(&["car"]), 1e-3, 0);
    let losses = model.fit(&samples, 20_000, 0)?;
    println!(
        "{} samples, loss {:.4} -> {:.4}",
        samples.len(),
        losses[..500].iter().sum::<f64>() / 500.0,
        losses[losses.len() - 500..].iter().sum::<f64>() / 100.0
    );

    let ground = |a: &siamtrack::geometry::Box3D, b: &siamtrack::geometry::Box3D| {
        ((a.centre[0] - b.centre[0]).powi(2) + (a.centre[2] - b.centre[2]).powi(2)).sqrt()
    };
    let (mut err, mut cv) = (0.0, 0.0);
    for t in &test {
        let gt = t[window + 1];
        err += ground(&model.predict_next(&t[..window + 1])?, &gt);
        cv += ground(&BevDelta::between(&t[window - 1], &t[window]).apply(&t[window]), &gt);
    }
    let n = test.len() as f64;
    println!(
        "mean ground-plane centre error on held-out tracks: {:.3} m (constant velocity {:.3} m)",
        err / n,
        cv / n
    );
    Ok(())
}
