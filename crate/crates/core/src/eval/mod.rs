//! Dataset IO, scoring, simulation and rendering.

pub mod dataset;
pub mod kitti;
pub mod metrics;
pub mod mot;
pub mod pipeline;
pub mod sim;
pub mod svg;
pub mod synth;

pub use dataset::{dataset_digest, load_dataset, write_dataset, CropSource, Dataset, Manifest};
pub use kitti::{parse_kitti, parse_kitti_str, KittiRecord};
pub use metrics::{average_precision, score, ClearMot};
pub use mot::{
    format_detections, format_ground_truth, format_tracks, parse_mot, parse_mot_str, pixel_iou, write_detections,
    write_ground_truth, write_tracks, DetectionRecord, GroundTruthRecord, MotData, PixelBox, TrackRecord,
};
pub use pipeline::{run_sequence, SequenceOutput};
pub use sim::{
    clean_scenario, occlusion_scenario, simulate, MotionProfile, OcclusionEvent, SceneRenderer, SimDetection,
    SimObject, SimOutput, SimScenario, OCCLUDED_ID,
};
pub use svg::{render_svg, track_color, write_svg};
pub use synth::{tracklets_2d, tracklets_3d, TrackletConfig};
