//! Constant-velocity Kalman filter on a noisy linear track.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use siamtrack::geometry::{iou, BBox2D};
use siamtrack::motion::{KalmanConfig, KalmanState};

fn main() -> siamtrack::Result<()> {
    let cfg = KalmanConfig::default();
    let noise = Normal::new(0.0, 0.002).expect("valid std");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let truth = |t: usize| BBox2D::new(0.2 + 0.01 * t as f64, 0.5 - 0.004 * t as f64, 0.2, 0.08);

    let mut state = KalmanState::initiate(&truth(0)?, &cfg);
    for t in 1..40 {
        let predicted = state.predict(&cfg);
        let gt = truth(t)?;
        let z = BBox2D::new(
            gt.cx() + noise.sample(&mut rng),
            gt.cy() + noise.sample(&mut rng),
            gt.h(),
            gt.w(),
        )?;
        let estimate = state.update(&z, &cfg)?;
        if t % 8 == 0 {
            println!(
                "t={t:2}  predicted IoU {:.3}  filtered IoU {:.3}  vx {:+.4}",
                iou(&predicted, &gt),
                iou(&estimate, &gt),
                state.mean()[4]
            );
        }
    }
    Ok(())
}
