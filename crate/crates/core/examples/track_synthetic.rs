//! Simulate a clean multi-object sequence, track it, score it and render
//! one frame as SVG.

use siamtrack::association::{Predictor, Tracker, TrackerConfig};
use siamtrack::eval::{clean_scenario, run_sequence, score, simulate, write_svg, CropSource, SceneRenderer};

fn main() -> siamtrack::Result<()> {
    let scenario = clean_scenario(4, 60);
    let sim = simulate(&scenario, 0)?;
    let crops = CropSource::Procedural(Box::new(SceneRenderer::new(&scenario)?));
    let (w, h) = (scenario.image_width as f64, scenario.image_height as f64);

    let mut tracker = Tracker::new(TrackerConfig::default(), Predictor::Kalman)?;
    let out = run_sequence(&mut tracker, &sim.detection_records(), scenario.frames, &crops, w, h)?;
    let m = score(&sim.ground_truth, &out.tracks, 0.5)?;
    println!(
        "MOTA {:.3}  MOTP {:.3}  IDSW {}  MT {}/{}",
        m.mota, m.motp, m.id_switches, m.mostly_tracked, m.trajectories
    );

    let frame = 30;
    let path = std::env::temp_dir().join("siamtrack-frame30.svg");
    write_svg(
        &path,
        scenario.image_width,
        scenario.image_height,
        &out.detections[&frame],
        &out.frame_tracks(frame),
    )?;
    println!("wrote {}", path.display());
    Ok(())
}
