//! Per-track box-delta prediction.
//!
//! [`MotionModel`] runs the observed deltas through an [`LstmCell`]; the
//! final hidden vector feeds four [`AnchorHeads`] (one per box parameter)
//! that classify the next delta into an anchor bin and regress a residual.
//! [`KalmanState`] is the constant-velocity baseline.

pub mod anchors;
pub mod checkpoint;
pub mod gradcheck;
pub mod heads;
pub mod kalman;
pub mod loss;
pub mod lstm;
pub mod model;
pub mod optim;
pub mod tensor;

/// Box parameter names in column order.
pub const PARAM_NAMES: [&str; 4] = ["x", "y", "h", "w"];

pub use anchors::{decode, encode_target, AnchorSet, DeltaVector, EncodedTarget};
pub use checkpoint::Checkpoint;
pub use heads::{AnchorHeads, MotionPredictorOutput};
pub use kalman::{KalmanConfig, KalmanState};
pub use loss::{classification_loss, regression_loss, total_loss, LossWeights};
pub use lstm::{LstmCell, LstmState};
pub use model::{samples_from_track, LstmTrackState, MotionConfig, MotionModel, MotionWeights, TrainingSample};
pub use optim::{Optimizer, OptimizerKind};
pub use tensor::{Matrix, Parameters};
