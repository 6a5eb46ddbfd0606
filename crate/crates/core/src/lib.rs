//! Online multi-object tracking by detection.
//!
//! The engine is assembled from five layers:
//!
//! * [`geometry`]: image-space boxes (IoU, IOA, occlusion fraction) and
//!   bird's-eye-view footprints with exact convex intersection areas.
//! * [`motion`]: a small LSTM that predicts per-frame box deltas as an
//!   anchor classification plus masked residual regression, trained by
//!   backpropagation through time, and a constant-velocity Kalman baseline.
//! * [`appearance`]: template extraction from 127x127 crops, template
//!   cross-correlation, the exponential appearance cost and the
//!   occlusion-weighted rolling template update.
//! * [`association`]: gated cost matrices, the Hungarian solver, the track
//!   lifecycle and the per-frame [`association::Tracker`].
//! * [`bev`]: the learnable-weighted 3D parameter loss, footprint overlap
//!   penalty, stationarity diagnostic and a 7-parameter delta predictor.
//!
//! [`eval`] holds dataset ingestion (MOT16 / KITTI tracking), CLEAR-MOT
//! scoring, the synthetic sequence simulator and SVG rendering; [`cli`]
//! wires everything into the `siamtrack` binary.

pub mod appearance;
pub mod association;
pub mod bev;
pub mod cli;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod motion;

pub use error::{Error, Result};
