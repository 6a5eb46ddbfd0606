//! Bin cross-entropy, argmax-masked Huber regression and their weighted sum.

use super::anchors::column_argmax;
use super::tensor::Matrix;

/// Floor applied inside `log` so a zero probability cannot produce `-inf`.
pub const LOG_FLOOR: f64 = 1e-12;

/// Quadratic within `delta`, linear outside.
#[inline]
pub fn huber(e: f64, delta: f64) -> f64 {
    let a = e.abs();
    if a <= delta {
        0.5 * e * e
    } else {
        delta * (a - 0.5 * delta)
    }
}

/// `d huber / d e`.
#[inline]
pub fn huber_grad(e: f64, delta: f64) -> f64 {
    if e.abs() <= delta {
        e
    } else {
        delta * e.signum()
    }
}

/// `d huber / d delta`.
#[inline]
pub fn huber_grad_delta(e: f64, delta: f64) -> f64 {
    let a = e.abs();
    if a <= delta {
        0.0
    } else {
        a - delta
    }
}

/// `-Σ c_true ⊙ log(c_pred)` over all entries.
pub fn classification_loss(c_pred: &Matrix, c_true: &Matrix) -> f64 {
    c_pred
        .data()
        .iter()
        .zip(c_true.data())
        .filter(|(_, &t)| t != 0.0)
        .map(|(&p, &t)| -t * p.max(LOG_FLOOR).ln())
        .sum()
}

/// `d classification_loss / d c_pred`.
pub fn classification_loss_grad(c_pred: &Matrix, c_true: &Matrix) -> Matrix {
    let data = c_pred
        .data()
        .iter()
        .zip(c_true.data())
        .map(|(&p, &t)| if p > LOG_FLOOR { -t / p } else { 0.0 })
        .collect();
    Matrix::from_vec(c_pred.rows(), c_pred.cols(), data)
}

/// One-hot mask of the predicted bin in each column.
pub fn argmax_mask(c_pred: &Matrix) -> Matrix {
    let mut mask = Matrix::zeros(c_pred.rows(), c_pred.cols());
    for (j, k) in column_argmax(c_pred).into_iter().enumerate() {
        mask.set(k, j, 1.0);
    }
    mask
}

/// Huber loss on residuals, counted only at each column's predicted bin.
pub fn regression_loss(c_pred: &Matrix, r_pred: &Matrix, r_true: &Matrix, huber_delta: f64) -> f64 {
    let mask = argmax_mask(c_pred);
    mask.data()
        .iter()
        .zip(r_pred.data().iter().zip(r_true.data()))
        .filter(|(&m, _)| m != 0.0)
        .map(|(&m, (&p, &t))| m * huber(p - t, huber_delta))
        .sum()
}

/// `d regression_loss / d r_pred`. The argmax mask is piecewise constant,
/// so the loss has no gradient with respect to `c_pred`.
pub fn regression_loss_grad(c_pred: &Matrix, r_pred: &Matrix, r_true: &Matrix, huber_delta: f64) -> Matrix {
    let mask = argmax_mask(c_pred);
    let data = mask
        .data()
        .iter()
        .zip(r_pred.data().iter().zip(r_true.data()))
        .map(|(&m, (&p, &t))| m * huber_grad(p - t, huber_delta))
        .collect();
    Matrix::from_vec(r_pred.rows(), r_pred.cols(), data)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub lambda_c: f64,
    pub lambda_r: f64,
    pub huber_delta: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_c: 1.0,
            lambda_r: 1.0,
            huber_delta: 1.0,
        }
    }
}

pub fn total_loss(c_pred: &Matrix, r_pred: &Matrix, c_true: &Matrix, r_true: &Matrix, w: &LossWeights) -> f64 {
    w.lambda_c * classification_loss(c_pred, c_true) + w.lambda_r * regression_loss(c_pred, r_pred, r_true, w.huber_delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one_hot(p: usize, bins: [usize; 4]) -> Matrix {
        let mut m = Matrix::zeros(p, 4);
        for (j, &k) in bins.iter().enumerate() {
            m.set(k, j, 1.0);
        }
        m
    }

    #[test]
    fn huber_branches() {
        assert_eq!(huber(0.0, 1.0), 0.0);
        assert_eq!(huber(1.0, 1.0), 0.5);
        assert_eq!(huber(1.0, 0.5), 1.5 * 0.5 * 0.5);
        assert_relative_eq!(huber(-4.0, 2.0), 1.5 * 4.0, epsilon = 1e-15);
        assert_eq!(huber_grad(3.0, 1.0), 1.0);
        assert_eq!(huber_grad(-0.5, 1.0), -0.5);
    }

    #[test]
    fn classification_anchor_values() {
        let t = one_hot(4, [0, 1, 2, 3]);
        assert!(classification_loss(&t, &t).abs() < 1e-12);
        let uniform = Matrix::from_vec(4, 4, vec![0.25; 16]);
        assert_relative_eq!(classification_loss(&uniform, &t), 4.0 * 4f64.ln(), epsilon = 1e-12);
        // Zero probability at the hot bin hits the floor instead of infinity.
        let zero = Matrix::zeros(4, 4);
        assert_relative_eq!(classification_loss(&zero, &t), -4.0 * LOG_FLOOR.ln(), epsilon = 1e-9);
    }

    #[test]
    fn classification_monotone_in_hot_probability() {
        let t = one_hot(2, [0, 0, 0, 0]);
        let mut prev = f64::INFINITY;
        for step in 1..20 {
            let p = step as f64 / 20.0;
            let c = Matrix::from_vec(2, 4, vec![p, p, p, p, 1.0 - p, 1.0 - p, 1.0 - p, 1.0 - p]);
            let l = classification_loss(&c, &t);
            assert!(l < prev);
            prev = l;
        }
    }

    #[test]
    fn regression_masking() {
        let c = one_hot(3, [1, 1, 1, 1]);
        let mut r_true = Matrix::zeros(3, 4);
        let mut r_pred = Matrix::zeros(3, 4);
        for j in 0..4 {
            r_true.set(1, j, 0.2);
            r_pred.set(1, j, 0.2);
            // Unmasked rows carry large errors that must be ignored.
            r_pred.set(0, j, 50.0);
        }
        assert_eq!(regression_loss(&c, &r_pred, &r_true, 1.0), 0.0);
        for j in 0..4 {
            r_pred.set(1, j, 0.3);
        }
        assert_relative_eq!(regression_loss(&c, &r_pred, &r_true, 1.0), 4.0 * 0.005, epsilon = 1e-12);
    }

    #[test]
    fn total_loss_selects_components() {
        let c_true = one_hot(3, [0, 1, 2, 0]);
        let c_pred = Matrix::from_vec(3, 4, vec![0.5, 0.2, 0.1, 0.6, 0.3, 0.5, 0.2, 0.2, 0.2, 0.3, 0.7, 0.2]);
        let r_true = Matrix::from_vec(3, 4, (0..12).map(|i| i as f64 * 0.01).collect());
        let r_pred = Matrix::from_vec(3, 4, (0..12).map(|i| (i as f64 * 0.37).sin()).collect());
        let lc = classification_loss(&c_pred, &c_true);
        let lr = regression_loss(&c_pred, &r_pred, &r_true, 1.0);
        let w = |a, b| LossWeights {
            lambda_c: a,
            lambda_r: b,
            huber_delta: 1.0,
        };
        assert_eq!(total_loss(&c_pred, &r_pred, &c_true, &r_true, &w(1.0, 0.0)), lc);
        assert_eq!(total_loss(&c_pred, &r_pred, &c_true, &r_true, &w(0.0, 1.0)), lr);
        assert_relative_eq!(
            total_loss(&c_pred, &r_pred, &c_true, &r_true, &w(2.5, 0.5)),
            2.5 * lc + 0.5 * lr,
            epsilon = 1e-12
        );
    }
}
