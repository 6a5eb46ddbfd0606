//! Train the LSTM motion model on synthetic tracklets and compare it with
//! a last-box baseline on held-out tracks.

use siamtrack::eval::{tracklets_2d, TrackletConfig};
use siamtrack::geometry::iou;
use siamtrack::motion::{samples_from_track, MotionConfig, MotionModel};

fn main() -> siamtrack::Result<()> {
    let window = 10;
    let cfg = TrackletConfig::default();
    let train = tracklets_2d(400, &cfg, 1)?;
    let test = tracklets_2d(100, &cfg, 2)?;
    let samples: Vec<_> = train.iter().flat_map(|t| samples_from_track(t, window)).collect();

    let mut model = MotionModel::new(&MotionConfig {
        hidden_dim: 32,
        ..MotionConfig::default()
    });
    let losses = model.fit(&samples, 40_000, 0)?;
    let head = losses[..500].iter().sum::<f64>() / 500.0;
    let tail = losses[losses.len() - 500..].iter().sum::<f64>() / 500.0;
    println!("{} samples, loss {head:.4} -> {tail:.4}", samples.len());

    let (mut lstm, mut last, mut n) = (0.0, 0.0, 0);
    for track in &test {
        for end in window + 1..track.len() {
            let history = &track[end - window - 1..end];
            let gt = &track[end];
            lstm += iou(&model.predict_next(history)?, gt);
            last += iou(&track[end - 1], gt);
            n += 1;
        }
    }
    println!("mean next-box IoU: lstm {:.3}, last box {:.3}", lstm / n as f64, last / n as f64);

    let path = std::env::temp_dir().join("siamtrack-motion.ckpt");
    model.save(&path)?;
    let reloaded = MotionModel::load(&path)?;
    let same = reloaded.predict_next(&test[0][..window + 1])? == model.predict_next(&test[0][..window + 1])?;
    println!("checkpoint {} reloads identically: {same}", path.display());
    Ok(())
}
