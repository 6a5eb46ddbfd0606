//! Synthetic single-object tracklets for training the motion predictors.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::geometry::{BBox2D, Box3D};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackletConfig {
    pub length: usize,
    /// Share of sinusoidal tracklets; the rest move at constant velocity.
    pub sinusoidal_fraction: f64,
    /// Per-frame speed bound in normalized image units.
    pub max_speed: f64,
    /// Gaussian jitter on every coordinate, normalized units.
    pub noise_std: f64,
}

impl Default for TrackletConfig {
    fn default() -> Self {
        Self {
            length: 40,
            sinusoidal_fraction: 0.5,
            max_speed: 0.01,
            noise_std: 0.0,
        }
    }
}

/// Normalized box sequences kept inside the image.
pub fn tracklets_2d(n: usize, cfg: &TrackletConfig, seed: u64) -> Result<Vec<Vec<BBox2D>>> {
    if cfg.length < 2 || !(0.0..=1.0).contains(&cfg.sinusoidal_fraction) {
        return Err(invalid("tracklets need length >= 2 and a sinusoidal share in [0, 1]"));
    }
    let noise = Normal::new(0.0, cfg.noise_std).map_err(|e| invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let h = rng.random_range(0.1..0.3);
        let w = h * rng.random_range(0.4..0.9);
        let v = [rng.random_range(-cfg.max_speed..cfg.max_speed), rng.random_range(-cfg.max_speed..cfg.max_speed)];
        let sinus = rng.random::<f64>() < cfg.sinusoidal_fraction;
        let amp = if sinus {
            [rng.random_range(0.0..0.03), rng.random_range(0.0..0.03)]
        } else {
            [0.0; 2]
        };
        let period = rng.random_range(15.0..40.0);
        let phase = rng.random_range(0.0..TAU);
        let growth = rng.random_range(-0.002..0.002);
        let span = cfg.length as f64;
        // Start so that the whole path stays inside [0.1, 0.9].
        let range = |k: usize| {
            let d = v[k] * span;
            let lo = 0.1 - d.min(0.0) + 2.0 * amp[k];
            let hi = 0.9 - d.max(0.0) - 2.0 * amp[k];
            if lo <= hi {
                (lo, hi)
            } else {
                let m = 0.5 * (lo + hi);
                (m, m)
            }
        };
        let (xl, xh) = range(0);
        let (yl, yh) = range(1);
        let (x0, y0) = (rng.random_range(xl..=xh), rng.random_range(yl..=yh));
        let mut seq = Vec::with_capacity(cfg.length);
        for t in 0..cfg.length {
            let t = t as f64;
            let s = (TAU * t / period + phase).sin() - phase.sin();
            let scale = (1.0 + growth * t).max(0.2);
            let mut p = [x0 + v[0] * t + amp[0] * s, y0 + v[1] * t + amp[1] * s, h * scale, w * scale];
            if cfg.noise_std > 0.0 {
                for c in &mut p {
                    *c += noise.sample(&mut rng);
                }
            }
            seq.push(BBox2D::new(p[0], p[1], p[2].max(1e-3), p[3].max(1e-3))?);
        }
        out.push(seq);
    }
    Ok(out)
}

/// Ground-plane tracklets of 3D boxes (metres, radians) for one class.
pub fn tracklets_3d(n: usize, length: usize, size: [f64; 3], seed: u64) -> Result<Vec<Vec<Box3D>>> {
    if length < 2 {
        return Err(invalid("tracklets need length >= 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let yaw0: f64 = rng.random_range(-3.0..3.0);
        let speed = rng.random_range(0.2..1.0);
        let turn = rng.random_range(-0.03..0.03);
        let mut c = [rng.random_range(-10.0..10.0), size[0] * 0.5, rng.random_range(10.0..40.0)];
        let mut yaw = yaw0;
        let mut seq = Vec::with_capacity(length);
        for _ in 0..length {
            seq.push(Box3D::new(c, size, crate::geometry::wrap_angle(yaw))?);
            c[0] += speed * yaw.cos();
            c[2] += speed * yaw.sin();
            yaw += turn;
        }
        out.push(seq);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracklets_are_deterministic_and_in_frame() {
        let cfg = TrackletConfig::default();
        let a = tracklets_2d(50, &cfg, 9).unwrap();
        assert_eq!(a, tracklets_2d(50, &cfg, 9).unwrap());
        for seq in &a {
            assert_eq!(seq.len(), cfg.length);
            for b in seq {
                assert!((0.0..=1.0).contains(&b.cx()) && (0.0..=1.0).contains(&b.cy()));
            }
        }
    }

    #[test]
    fn tracklets_3d_are_smooth() {
        let t = tracklets_3d(5, 20, [1.5, 1.6, 3.9], 2).unwrap();
        for seq in &t {
            for w in seq.windows(2) {
                let d = ((w[1].centre[0] - w[0].centre[0]).powi(2) + (w[1].centre[2] - w[0].centre[2]).powi(2)).sqrt();
                assert!(d <= 1.0 + 1e-12);
            }
        }
    }
}
