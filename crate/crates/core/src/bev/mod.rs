//! Bird's-eye-view losses for 3D box prediction.
//!
//! [`pred_loss`] weights per-parameter Huber errors and a wrap-safe angle
//! loss; [`intersection_penalty`] charges the overlap of predicted
//! footprints on the ground plane. [`refine`] runs gradient descent on their
//! sum and [`stationarity_check`] reports how well the two gradients balance
//! at the end point.

mod loss;
mod optimize;
mod predictor;
mod scene_io;

pub use loss::{
    angle_loss, angle_loss_grad, class_pair, huber, huber_grad, huber_grad_delta, intersection_penalty,
    intersection_penalty_grad, pair_overlap, pred_loss, pred_loss_grad, total_bev_loss, total_bev_loss_grad,
    BevGradient, BevLearnables, Scene3D, SceneObject, BOX_PARAMS,
};
pub use optimize::{refine, stationarity_check, ParamMask, RefineConfig, RefineStep, RefineTrace, StationarityReport};
pub use predictor::{bev_samples_from_track, delta_loss, BevDelta, BevPredictor, BevSample, BevWeights, BEV_MAGIC};
pub use scene_io::{format_scene, pair_scenes, parse_scene, parse_scene_str, write_scene, SceneRecord};
