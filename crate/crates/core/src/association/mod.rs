//! Gated assignment of detections to tracks and the per-frame tracker.

mod cost;
mod hungarian;
mod track;
mod tracker;

pub use cost::{build_cost_matrix, AssociationConfig, Candidate, CostMatrix};
pub use hungarian::{assignment_cost, hungarian, hungarian_solve};
pub use track::{Track, TrackStatus, HISTORY_LEN};
pub use tracker::{Detection, DetectionAppearance, Predictor, TrackOutput, Tracker, TrackerConfig};
