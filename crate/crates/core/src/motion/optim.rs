use super::tensor::Parameters;

/// First-order update rule applied to a [`Parameters`] implementor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerKind {
    /// Plain gradient descent.
    Sgd,
    /// Adam with the usual `(0.9, 0.999, 1e-8)` constants.
    Adam,
}

#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    learning_rate: f64,
    /// Gradients with a larger global L2 norm are rescaled to this norm.
    clip_norm: Option<f64>,
    step: u64,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f64) -> Self {
        Self {
            kind,
            learning_rate,
            clip_norm: None,
            step: 0,
            first: Vec::new(),
            second: Vec::new(),
        }
    }

    pub fn with_clip_norm(mut self, clip: Option<f64>) -> Self {
        self.clip_norm = clip;
        self
    }

    pub fn kind(&self) -> OptimizerKind {
        self.kind
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn clip_norm(&self) -> Option<f64> {
        self.clip_norm
    }

    pub fn set_learning_rate(&mut self, lr: f64) {
        self.learning_rate = lr;
    }

    /// Apply one update. `grads` must have the same tensor layout as `params`.
    pub fn apply<P: Parameters + ?Sized, G: Parameters + ?Sized>(&mut self, params: &mut P, grads: &G) {
        if self.learning_rate == 0.0 {
            return;
        }
        let grad_views = grads.tensors();
        let scale = match self.clip_norm {
            Some(limit) => {
                let norm = grad_views
                    .iter()
                    .flat_map(|t| t.data.iter())
                    .map(|g| g * g)
                    .sum::<f64>()
                    .sqrt();
                if norm > limit {
                    limit / norm
                } else {
                    1.0
                }
            }
            None => 1.0,
        };
        self.step += 1;
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, g) in params.tensors_mut().into_iter().zip(&grad_views) {
                    for (w, &d) in p.iter_mut().zip(g.data) {
                        *w -= self.learning_rate * scale * d;
                    }
                }
            }
            OptimizerKind::Adam => {
                if self.first.is_empty() {
                    self.first = grad_views.iter().map(|t| vec![0.0; t.data.len()]).collect();
                    self.second = self.first.clone();
                }
                let t = self.step as i32;
                let bias1 = 1.0 - BETA1.powi(t);
                let bias2 = 1.0 - BETA2.powi(t);
                let lr = self.learning_rate;
                for (((p, g), m), v) in params
                    .tensors_mut()
                    .into_iter()
                    .zip(&grad_views)
                    .zip(self.first.iter_mut())
                    .zip(self.second.iter_mut())
                {
                    for i in 0..p.len() {
                        let d = g.data[i] * scale;
                        m[i] = BETA1 * m[i] + (1.0 - BETA1) * d;
                        v[i] = BETA2 * v[i] + (1.0 - BETA2) * d * d;
                        let m_hat = m[i] / bias1;
                        let v_hat = v[i] / bias2;
                        p[i] -= lr * m_hat / (v_hat.sqrt() + EPS);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::tensor::TensorRef;

    struct Quad(Vec<f64>);

    impl Parameters for Quad {
        fn tensors(&self) -> Vec<TensorRef<'_>> {
            vec![TensorRef {
                name: "x".into(),
                rows: self.0.len(),
                cols: 1,
                data: &self.0,
            }]
        }
        fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
            vec![&mut self.0]
        }
    }

    #[test]
    fn both_rules_minimize_a_quadratic() {
        for kind in [OptimizerKind::Sgd, OptimizerKind::Adam] {
            let mut x = Quad(vec![3.0, -2.0]);
            let mut opt = Optimizer::new(kind, 0.05);
            for _ in 0..2000 {
                let g = Quad(x.0.iter().map(|v| 2.0 * v).collect());
                opt.apply(&mut x, &g);
            }
            assert!(x.0.iter().all(|v| v.abs() < 1e-3), "{kind:?}: {:?}", x.0);
        }
    }

    #[test]
    fn zero_learning_rate_is_a_no_op() {
        let mut x = Quad(vec![1.0]);
        let mut opt = Optimizer::new(OptimizerKind::Adam, 0.0);
        opt.apply(&mut x, &Quad(vec![5.0]));
        assert_eq!(x.0, vec![1.0]);
    }

    #[test]
    fn clipping_bounds_the_step() {
        let mut x = Quad(vec![0.0]);
        let mut opt = Optimizer::new(OptimizerKind::Sgd, 1.0).with_clip_norm(Some(0.5));
        opt.apply(&mut x, &Quad(vec![100.0]));
        assert_eq!(x.0, vec![-0.5]);
    }
}
