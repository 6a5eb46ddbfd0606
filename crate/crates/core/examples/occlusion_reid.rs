//! An object hidden behind a screen for 25 frames keeps its id after it
//! reappears.

use siamtrack::association::{Predictor, Tracker, TrackerConfig};
use siamtrack::eval::{occlusion_scenario, run_sequence, score, simulate, CropSource, SceneRenderer, OCCLUDED_ID};

fn main() -> siamtrack::Result<()> {
    for seed in 0..3 {
        let scenario = occlusion_scenario(seed, 200, 25)?;
        let sim = simulate(&scenario, seed)?;
        let crops = CropSource::Procedural(Box::new(SceneRenderer::new(&scenario)?));
        let (w, h) = (scenario.image_width as f64, scenario.image_height as f64);
        let mut tracker = Tracker::new(TrackerConfig::default(), Predictor::Kalman)?;
        let out = run_sequence(&mut tracker, &sim.detection_records(), scenario.frames, &crops, w, h)?;
        let m = score(&sim.ground_truth, &out.tracks, 0.5)?;
        let ids = m.hypothesis_ids(OCCLUDED_ID);
        println!(
            "seed {seed}: occluded object matched to ids {ids:?}, coverage {:.2}, MOTA {:.3}, IDSW {}",
            m.coverage[&OCCLUDED_ID], m.mota, m.id_switches
        );
    }
    Ok(())
}
