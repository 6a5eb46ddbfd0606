use rand::Rng;

use crate::error::{Error, Result};

use super::tensor::{Matrix, Parameters, TensorRef};
use super::PARAM_NAMES;

/// Paired classification and regression outputs, each `P x 4`
/// (one column per box parameter `x, y, h, w`).
#[derive(Debug, Clone, PartialEq)]
pub struct MotionPredictorOutput {
    pub c_out: Matrix,
    pub r_out: Matrix,
}

/// Dense layer emitting `P` bin logits followed by `P` residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHead {
    pub(crate) weights: Matrix,
    pub(crate) bias: Vec<f64>,
}

/// Four independent dense heads, one per box parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorHeads {
    bins: usize,
    hidden_dim: usize,
    pub(crate) heads: Vec<DenseHead>,
}

impl AnchorHeads {
    pub fn zeros(bins: usize, hidden_dim: usize) -> Self {
        Self {
            bins,
            hidden_dim,
            heads: (0..4)
                .map(|_| DenseHead {
                    weights: Matrix::zeros(2 * bins, hidden_dim),
                    bias: vec![0.0; 2 * bins],
                })
                .collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(bins: usize, hidden_dim: usize, rng: &mut R) -> Self {
        let scale = 1.0 / (hidden_dim as f64).sqrt();
        Self {
            bins,
            hidden_dim,
            heads: (0..4)
                .map(|_| DenseHead {
                    weights: Matrix::random(2 * bins, hidden_dim, scale, rng),
                    bias: vec![0.0; 2 * bins],
                })
                .collect(),
        }
    }

    pub(crate) fn from_parts(bins: usize, hidden_dim: usize, heads: Vec<DenseHead>) -> Result<Self> {
        let ok = heads.len() == 4
            && heads.iter().all(|h| {
                h.weights.rows() == 2 * bins && h.weights.cols() == hidden_dim && h.bias.len() == 2 * bins
            });
        if !ok {
            return Err(Error::Shape("head weights do not match dimensions".into()));
        }
        Ok(Self { bins, hidden_dim, heads })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    /// Per-parameter softmax over bin logits plus raw residuals.
    pub fn forward(&self, feature: &[f64]) -> Result<MotionPredictorOutput> {
        if feature.len() != self.hidden_dim {
            return Err(Error::Shape(format!(
                "temporal feature has length {}, expected {}",
                feature.len(),
                self.hidden_dim
            )));
        }
        let p = self.bins;
        let mut c_out = Matrix::zeros(p, 4);
        let mut r_out = Matrix::zeros(p, 4);
        let mut y = vec![0.0; 2 * p];
        for (j, head) in self.heads.iter().enumerate() {
            head.weights.affine_into(feature, &head.bias, &mut y);
            let probs = softmax(&y[..p]);
            for k in 0..p {
                c_out.set(k, j, probs[k]);
                r_out.set(k, j, y[p + k]);
            }
        }
        Ok(MotionPredictorOutput { c_out, r_out })
    }

    /// Backpropagate `dL/dc_out` and `dL/dr_out` to the head weights
    /// (accumulated into `grads`) and return `dL/dfeature`.
    pub fn backward(
        &self,
        feature: &[f64],
        out: &MotionPredictorOutput,
        d_c_out: &Matrix,
        d_r_out: &Matrix,
        grads: &mut AnchorHeads,
    ) -> Vec<f64> {
        let p = self.bins;
        let mut d_feature = vec![0.0; self.hidden_dim];
        let mut dy = vec![0.0; 2 * p];
        for (j, head) in self.heads.iter().enumerate() {
            // Softmax Jacobian: dz_k = p_k (g_k - Σ_m g_m p_m).
            let weighted: f64 = (0..p).map(|m| d_c_out.get(m, j) * out.c_out.get(m, j)).sum();
            for k in 0..p {
                let pk = out.c_out.get(k, j);
                dy[k] = pk * (d_c_out.get(k, j) - weighted);
                dy[p + k] = d_r_out.get(k, j);
            }
            let g = &mut grads.heads[j];
            g.weights.outer_acc(&dy, feature);
            for (b, d) in g.bias.iter_mut().zip(&dy) {
                *b += d;
            }
            head.weights.transpose_mul_acc(&dy, &mut d_feature);
        }
        d_feature
    }
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

impl Parameters for AnchorHeads {
    fn tensors(&self) -> Vec<TensorRef<'_>> {
        let mut out = Vec::with_capacity(8);
        for (head, name) in self.heads.iter().zip(PARAM_NAMES) {
            out.push(TensorRef {
                name: format!("head.{name}.weights"),
                rows: head.weights.rows(),
                cols: head.weights.cols(),
                data: head.weights.data(),
            });
            out.push(TensorRef {
                name: format!("head.{name}.bias"),
                rows: head.bias.len(),
                cols: 1,
                data: &head.bias,
            });
        }
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(8);
        for head in self.heads.iter_mut() {
            out.push(head.weights.data_mut());
            out.push(&mut head.bias[..]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_heads_are_uniform() {
        let heads = AnchorHeads::zeros(7, 5);
        let out = heads.forward(&[0.3, -1.0, 2.0, 0.0, 0.5]).unwrap();
        for j in 0..4 {
            for k in 0..7 {
                assert!((out.c_out.get(k, j) - 1.0 / 7.0).abs() < 1e-15);
                assert_eq!(out.r_out.get(k, j), 0.0);
            }
        }
    }

    #[test]
    fn columns_are_distributions_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let heads = AnchorHeads::random(4, 6, &mut rng);
        let f = [0.9, -3.0, 0.1, 5.0, -0.7, 0.2];
        let a = heads.forward(&f).unwrap();
        let b = heads.forward(&f).unwrap();
        assert_eq!(a, b);
        for j in 0..4 {
            let s: f64 = a.c_out.column(j).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(a.c_out.column(j).iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn rejects_wrong_feature_length() {
        assert!(AnchorHeads::zeros(4, 3).forward(&[0.0; 2]).is_err());
    }
}
