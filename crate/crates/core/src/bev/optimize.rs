//! Gradient-descent refinement of predicted boxes and the stationarity
//! diagnostic at its end point.

use crate::error::{invalid, Result};
use crate::motion::gradcheck::central_difference;

use super::loss::{intersection_penalty, pred_loss, pred_loss_grad, total_bev_loss_grad, BevLearnables, Scene3D};

/// Which of the seven box parameters may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamMask(pub [bool; 7]);

impl ParamMask {
    pub const ALL: ParamMask = ParamMask([true; 7]);
    /// Ground-plane position and yaw.
    pub const POSE: ParamMask = ParamMask([true, false, true, false, false, false, true]);

    fn expand(&self, n: usize) -> Vec<bool> {
        (0..n).flat_map(|_| self.0).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    /// Discrete gradient of the prediction loss, per object.
    pub pred_grad: Vec<[f64; 7]>,
    /// Discrete gradient of the weighted overlap penalty, per object.
    pub penalty_grad: Vec<[f64; 7]>,
    /// `pred_grad + penalty_grad`; zero at a stationary point.
    pub residual: Vec<[f64; 7]>,
    pub residual_norm: f64,
}

/// Central-difference gradients of both loss terms over the free parameters.
///
/// A diagnostic only: at a constrained optimum the prediction gradient is
/// balanced by the weighted overlap gradient and the residual vanishes.
pub fn stationarity_check(scene: &Scene3D, learn: &BevLearnables, h: f64, mask: ParamMask) -> Result<StationarityReport> {
    if !(h > 0.0) {
        return Err(invalid("difference step must be positive"));
    }
    let x = scene.pred_params();
    let free = mask.expand(scene.len());
    let mut probe = scene.clone();
    let mut eval = |f: &dyn Fn(&Scene3D) -> f64| -> Vec<f64> {
        let g = central_difference(
            |p| {
                probe.set_pred_params(p);
                f(&probe)
            },
            &x,
            h,
        );
        g.into_iter().zip(&free).map(|(v, &m)| if m { v } else { 0.0 }).collect()
    };
    // Surface a missing class weight before differencing.
    pred_loss(scene, learn)?;
    let gp = eval(&|s| pred_loss(s, learn).unwrap_or(f64::NAN));
    let gi = eval(&|s| intersection_penalty(s, learn));
    let to_objects = |v: &[f64]| -> Vec<[f64; 7]> { v.chunks(7).map(|c| c.try_into().expect("seven")).collect() };
    let residual: Vec<f64> = gp.iter().zip(&gi).map(|(a, b)| a + b).collect();
    Ok(StationarityReport {
        pred_grad: to_objects(&gp),
        penalty_grad: to_objects(&gi),
        residual_norm: residual.iter().map(|r| r * r).sum::<f64>().sqrt(),
        residual: to_objects(&residual),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineConfig {
    pub learning_rate: f64,
    pub max_steps: usize,
    /// Stop once the free-parameter gradient norm falls below this.
    pub tolerance: f64,
    pub mask: ParamMask,
    /// Include the overlap penalty; without it only the prediction loss is
    /// minimized.
    pub with_penalty: bool,
    /// Lower bound kept on box sizes when they are free.
    pub min_extent: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            max_steps: 5000,
            tolerance: 1e-9,
            mask: ParamMask::POSE,
            with_penalty: true,
            min_extent: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineStep {
    pub total: f64,
    pub pred: f64,
    pub penalty: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineTrace {
    /// State before each update, then the final state.
    pub steps: Vec<RefineStep>,
    pub converged: bool,
}

/// Plain gradient descent on the predicted boxes of `scene`.
pub fn refine(scene: &mut Scene3D, learn: &BevLearnables, cfg: &RefineConfig) -> Result<RefineTrace> {
    learn.validate()?;
    let free = cfg.mask.expand(scene.len());
    let mut steps = Vec::new();
    let mut converged = false;
    for step in 0..=cfg.max_steps {
        let grad = if cfg.with_penalty {
            total_bev_loss_grad(scene, learn)?
        } else {
            pred_loss_grad(scene, learn)?
        };
        let g: Vec<f64> = grad
            .flat_pred()
            .into_iter()
            .zip(&free)
            .map(|(v, &m)| if m { v } else { 0.0 })
            .collect();
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let pred = pred_loss(scene, learn)?;
        let penalty = intersection_penalty(scene, learn);
        steps.push(RefineStep {
            total: if cfg.with_penalty { pred + penalty } else { pred },
            pred,
            penalty,
            gradient_norm: norm,
        });
        if norm < cfg.tolerance {
            converged = true;
            break;
        }
        if step == cfg.max_steps {
            break;
        }
        let mut x = scene.pred_params();
        for (k, (xi, gi)) in x.iter_mut().zip(&g).enumerate() {
            *xi -= cfg.learning_rate * gi;
            if matches!(k % 7, 3..=5) {
                *xi = xi.max(cfg.min_extent);
            }
        }
        scene.set_pred_params(&x);
    }
    Ok(RefineTrace { steps, converged })
}
