use std::sync::Arc;

use siamtrack::association::{Predictor, Tracker, TrackerConfig};
use siamtrack::eval::{
    clean_scenario, occlusion_scenario, run_sequence, score, simulate, tracklets_2d, CropSource, SceneRenderer,
    SimScenario, TrackletConfig, OCCLUDED_ID,
};
use siamtrack::motion::{samples_from_track, MotionConfig, MotionModel};

fn track(s: &SimScenario, seed: u64, predictor: Predictor) -> siamtrack::eval::ClearMot {
    let sim = simulate(s, seed).unwrap();
    let crops = CropSource::Procedural(Box::new(SceneRenderer::new(s).unwrap()));
    let mut tracker = Tracker::new(TrackerConfig::default(), predictor).unwrap();
    let out = run_sequence(
        &mut tracker,
        &sim.detection_records(),
        s.frames,
        &crops,
        s.image_width as f64,
        s.image_height as f64,
    )
    .unwrap();
    score(&sim.ground_truth, &out.tracks, 0.5).unwrap()
}

fn trained_lstm() -> Arc<MotionModel> {
    let train = tracklets_2d(100, &TrackletConfig::default(), 11).unwrap();
    let samples: Vec<_> = train.iter().flat_map(|t| samples_from_track(t, 10)).collect();
    let mut m = MotionModel::new(&MotionConfig {
        hidden_dim: 16,
        ..MotionConfig::default()
    });
    m.fit(&samples, 4000, 11).unwrap();
    Arc::new(m)
}

#[test]
fn clean_sequence_is_tracked_perfectly_with_either_predictor() {
    let s = clean_scenario(3, 80);
    let kalman = track(&s, 0, Predictor::Kalman);
    assert_eq!(kalman.mota, 1.0);
    assert_eq!(kalman.id_switches, 0);
    let lstm = track(&s, 0, Predictor::Lstm(trained_lstm()));
    assert_eq!(lstm.mota, 1.0);
    assert_eq!(lstm.id_switches, 0);
}

#[test]
fn occluded_object_keeps_its_id() {
    let s = occlusion_scenario(3, 120, 15).unwrap();
    let m = track(&s, 3, Predictor::Kalman);
    assert_eq!(m.hypothesis_ids(OCCLUDED_ID).len(), 1, "{:?}", m.hypothesis_ids(OCCLUDED_ID));
    assert!(m.mt >= 0.8, "MT {}", m.mt);
    assert!(m.mota > 0.9, "MOTA {}", m.mota);
}

#[test]
fn tracking_is_deterministic() {
    let s = occlusion_scenario(1, 60, 10).unwrap();
    let a = track(&s, 1, Predictor::Kalman);
    let b = track(&s, 1, Predictor::Kalman);
    assert_eq!(a.assignments, b.assignments);
    assert_eq!(a.mota, b.mota);
}

#[test]
fn serial_and_parallel_encoding_agree() {
    let s = occlusion_scenario(2, 40, 8).unwrap();
    let sim = simulate(&s, 2).unwrap();
    let crops = CropSource::Procedural(Box::new(SceneRenderer::new(&s).unwrap()));
    let run = |parallel: bool| {
        let cfg = TrackerConfig {
            parallel_templates: parallel,
            ..TrackerConfig::default()
        };
        let mut tracker = Tracker::new(cfg, Predictor::Kalman).unwrap();
        run_sequence(&mut tracker, &sim.detection_records(), s.frames, &crops, 960.0, 540.0)
            .unwrap()
            .tracks
    };
    assert_eq!(run(true), run(false));
}

#[test]
fn unconfirmed_tracks_are_not_reported() {
    let mut s = clean_scenario(1, 30);
    s.false_positive_rate = 0.3;
    let sim = simulate(&s, 4).unwrap();
    let crops = CropSource::Procedural(Box::new(SceneRenderer::new(&s).unwrap()));
    let mut tracker = Tracker::new(TrackerConfig::default(), Predictor::Kalman).unwrap();
    let out = run_sequence(&mut tracker, &sim.detection_records(), s.frames, &crops, 640.0, 480.0).unwrap();
    let ids: std::collections::BTreeSet<i64> = out.tracks.iter().map(|t| t.id).collect();
    assert_eq!(ids.len(), 1, "isolated false positives never confirm: {ids:?}");
    assert!(sim.detections.iter().any(|d| d.source.is_none()));
}
