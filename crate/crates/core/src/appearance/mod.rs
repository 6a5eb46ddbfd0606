//! Template extraction, template similarity and the rolling template update.

mod hog;
mod image;
mod template;

pub use self::hog::HogEncoder;
pub(crate) use self::image::CropRect;
pub use self::image::{Frame, ImageCrop, CROP_SIZE};
pub use self::template::{cross_correlate, update_template, CrossCorrelationMap, Template};

use crate::error::{invalid, Result};

/// Turns a crop into a feature map. Implementations must be deterministic.
pub trait TemplateEncoder: Send + Sync {
    /// Template shape produced for crops with `crop_channels` channels.
    fn output_shape(&self, crop_channels: usize) -> (usize, usize, usize);

    fn encode(&self, crop: &ImageCrop) -> Result<Template>;
}

/// Exponent bound that keeps the cost finite and strictly positive.
const EXPONENT_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppearanceParams {
    /// Cost scale, the cost of two uncorrelated templates.
    pub scale: f64,
    /// Decay rate of the cost with total correlation.
    pub decay: f64,
    /// Correlate unit-norm templates instead of raw ones.
    pub normalize: bool,
}

impl Default for AppearanceParams {
    fn default() -> Self {
        // With unit-norm templates a perfect match has total correlation 1,
        // so ln 10 puts the self-match cost at one tenth of the scale.
        Self {
            scale: 1.0,
            decay: std::f64::consts::LN_10,
            normalize: true,
        }
    }
}

impl AppearanceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(invalid("appearance scale must be positive"));
        }
        if !(self.decay >= 0.0 && self.decay.is_finite()) {
            return Err(invalid("appearance decay must be non-negative"));
        }
        Ok(())
    }
}

/// `scale * exp(-decay * Σ f)`; the exponent saturates at ±700.
pub fn appearance_cost(map: &CrossCorrelationMap, params: &AppearanceParams) -> f64 {
    cost_from_sum(map.sum(), params)
}

fn cost_from_sum(total: f64, params: &AppearanceParams) -> f64 {
    if params.decay == 0.0 {
        return params.scale;
    }
    let exponent = (-params.decay * total).clamp(-EXPONENT_LIMIT, EXPONENT_LIMIT);
    params.scale * exponent.exp()
}

/// Total correlation of two templates, normalized if `params` asks for it.
pub fn correlation_sum(track: &Template, detection: &Template, params: &AppearanceParams) -> Result<f64> {
    let raw = cross_correlate(track, detection)?.sum();
    if !params.normalize {
        return Ok(raw);
    }
    let denom = track.norm() * detection.norm();
    Ok(if denom == 0.0 { 0.0 } else { raw / denom })
}

/// Appearance cost between a track template and a detection template.
pub fn pair_cost(track: &Template, detection: &Template, params: &AppearanceParams) -> Result<f64> {
    Ok(cost_from_sum(correlation_sum(track, detection, params)?, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(values: Vec<f64>) -> CrossCorrelationMap {
        CrossCorrelationMap {
            height: 1,
            width: values.len(),
            values,
        }
    }

    #[test]
    fn cost_anchor_values() {
        let p = AppearanceParams {
            scale: 2.0,
            decay: 1.0,
            normalize: false,
        };
        assert_eq!(appearance_cost(&map(vec![0.0]), &p), 2.0);
        let half = AppearanceParams { scale: 1.0, ..p };
        assert!((appearance_cost(&map(vec![0.5 * 2f64.ln(), 0.5 * 2f64.ln()]), &half) - 0.5).abs() < 1e-15);
        let flat = AppearanceParams { decay: 0.0, ..p };
        assert_eq!(appearance_cost(&map(vec![1e9]), &flat), 2.0);
    }

    #[test]
    fn cost_saturates() {
        let p = AppearanceParams::default();
        let hi = appearance_cost(&map(vec![-1e6]), &p);
        let lo = appearance_cost(&map(vec![1e6]), &p);
        assert!(hi.is_finite() && lo > 0.0);
    }

    #[test]
    fn normalized_self_cost_is_a_tenth() {
        let enc = HogEncoder::default();
        let crop = ImageCrop::from_fn(3, |x, y, c| (((x / 6) + (y / 9) + c) % 2) as f32).unwrap();
        let t = enc.encode(&crop).unwrap();
        let c = pair_cost(&t, &t, &AppearanceParams::default()).unwrap();
        assert!((c - 0.1).abs() < 1e-12);
        // Scaling either side does not matter once normalized.
        let c2 = pair_cost(&t.scaled(5.0), &t, &AppearanceParams::default()).unwrap();
        assert!((c - c2).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(AppearanceParams::default().validate().is_ok());
        let bad = AppearanceParams {
            scale: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
