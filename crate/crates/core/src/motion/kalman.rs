//! Constant-velocity Kalman filter over `(cx, cy, h, w)` and their rates.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::geometry::BBox2D;

use super::model::MIN_EXTENT;

type Vec8 = SVector<f64, 8>;
type Mat8 = SMatrix<f64, 8, 8>;
type Mat4 = SMatrix<f64, 4, 4>;
type Mat48 = SMatrix<f64, 4, 8>;

/// Noise levels as standard deviations in normalized image units per frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanConfig {
    pub process_noise: f64,
    pub measurement_noise: f64,
    /// Prior standard deviation of the unobserved velocities.
    pub initial_velocity_std: f64,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        Self {
            process_noise: 5e-3,
            measurement_noise: 1e-2,
            initial_velocity_std: 5e-2,
        }
    }
}

impl KalmanConfig {
    pub fn noiseless() -> Self {
        Self {
            process_noise: 0.0,
            measurement_noise: 0.0,
            initial_velocity_std: 1.0,
        }
    }

    fn transition() -> Mat8 {
        let mut f = Mat8::identity();
        for i in 0..4 {
            f[(i, i + 4)] = 1.0;
        }
        f
    }

    fn observation() -> Mat48 {
        let mut h = Mat48::zeros();
        for i in 0..4 {
            h[(i, i)] = 1.0;
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState {
    mean: Vec8,
    covariance: Mat8,
}

impl KalmanState {
    /// Zero-velocity state centred on the first measurement.
    pub fn initiate(measurement: &BBox2D, cfg: &KalmanConfig) -> Self {
        let p = measurement.params();
        let mut mean = Vec8::zeros();
        for i in 0..4 {
            mean[i] = p[i];
        }
        let mut covariance = Mat8::zeros();
        for i in 0..4 {
            covariance[(i, i)] = cfg.measurement_noise.powi(2);
            covariance[(i + 4, i + 4)] = cfg.initial_velocity_std.powi(2);
        }
        Self { mean, covariance }
    }

    pub fn mean(&self) -> [f64; 8] {
        self.mean.into()
    }

    pub fn covariance(&self) -> &Mat8 {
        &self.covariance
    }

    /// Advance one frame and return the predicted box.
    pub fn predict(&mut self, cfg: &KalmanConfig) -> BBox2D {
        let f = KalmanConfig::transition();
        self.mean = f * self.mean;
        let q = Mat8::identity() * cfg.process_noise.powi(2);
        self.covariance = f * self.covariance * f.transpose() + q;
        self.symmetrize();
        self.box_estimate()
    }

    /// Fold in a measurement with the Joseph-form covariance update.
    pub fn update(&mut self, measurement: &BBox2D, cfg: &KalmanConfig) -> Result<BBox2D> {
        let z = measurement.params();
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Kalman measurement"));
        }
        let h = KalmanConfig::observation();
        let r = Mat4::identity() * cfg.measurement_noise.powi(2);
        let s = h * self.covariance * h.transpose() + r;
        let s_inv = match s.try_inverse() {
            Some(inv) if inv.iter().all(|v| v.is_finite()) => inv,
            // A singular innovation (zero noise, collapsed covariance) means
            // the prediction is already certain; the pseudo-inverse then
            // yields zero gain along the collapsed directions.
            _ => s.pseudo_inverse(1e-15).unwrap_or_else(|_| Mat4::zeros()),
        };
        let gain = self.covariance * h.transpose() * s_inv;
        let innovation = SVector::<f64, 4>::from(z) - h * self.mean;
        self.mean += gain * innovation;
        let i_kh = Mat8::identity() - gain * h;
        self.covariance = i_kh * self.covariance * i_kh.transpose() + gain * r * gain.transpose();
        self.symmetrize();
        Ok(self.box_estimate())
    }

    pub fn box_estimate(&self) -> BBox2D {
        let m = &self.mean;
        BBox2D::new(m[0], m[1], m[2].max(MIN_EXTENT), m[3].max(MIN_EXTENT)).unwrap_or(
            // Estimates are finite because the inputs were; keep a valid box anyway.
            BBox2D::new(0.5, 0.5, MIN_EXTENT, MIN_EXTENT).expect("constant box is valid"),
        )
    }

    fn symmetrize(&mut self) {
        self.covariance = (self.covariance + self.covariance.transpose()) * 0.5;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::iou;

    fn track(n: usize) -> Vec<BBox2D> {
        (0..n)
            .map(|i| BBox2D::new(0.1 + 0.02 * i as f64, 0.5 - 0.01 * i as f64, 0.2 + 0.001 * i as f64, 0.1).unwrap())
            .collect()
    }

    #[test]
    fn noiseless_constant_velocity_is_exact_after_burn_in() {
        let cfg = KalmanConfig::noiseless();
        let truth = track(20);
        let mut s = KalmanState::initiate(&truth[0], &cfg);
        for k in 1..truth.len() {
            let predicted = s.predict(&cfg);
            if k >= 2 {
                assert!((iou(&predicted, &truth[k]) - 1.0).abs() < 1e-9, "frame {k}");
            }
            s.update(&truth[k], &cfg).unwrap();
        }
    }

    #[test]
    fn measurement_equal_to_prediction_keeps_mean() {
        let cfg = KalmanConfig::default();
        let mut s = KalmanState::initiate(&track(1)[0], &cfg);
        let predicted = s.predict(&cfg);
        let before = s.mean();
        s.update(&predicted, &cfg).unwrap();
        for (a, b) in before.iter().zip(s.mean()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn update_does_not_increase_trace_and_keeps_psd() {
        let cfg = KalmanConfig::default();
        let t = track(10);
        let mut s = KalmanState::initiate(&t[0], &cfg);
        for b in &t[1..] {
            s.predict(&cfg);
            let before = s.covariance().trace();
            s.update(b, &cfg).unwrap();
            assert!(s.covariance().trace() <= before + 1e-15);
            let c = s.covariance();
            assert!((c - c.transpose()).abs().max() < 1e-15);
            let eig = c.symmetric_eigenvalues();
            assert!(eig.iter().all(|&e| e > -1e-15));
        }
    }
}
