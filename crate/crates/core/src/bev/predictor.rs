//! LSTM regression of the next 3D parameter change.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::{wrap_angle, Box3D};
use crate::motion::checkpoint::Checkpoint;
use crate::motion::model::cosine_factor;
use crate::motion::lstm::{LstmCell, LstmState};
use crate::motion::tensor::{Matrix, Parameters, TensorRef};
use crate::motion::{Optimizer, OptimizerKind};

use super::loss::{angle_loss, angle_loss_grad, huber, huber_grad, BevLearnables};

pub const BEV_MAGIC: &str = "siamtrack-bev";

/// Per-frame change of `[Cx, Cy, Cz, h, w, l, yaw]`; the yaw change is wrapped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BevDelta(pub [f64; 7]);

impl BevDelta {
    pub const ZERO: BevDelta = BevDelta([0.0; 7]);

    pub fn between(prev: &Box3D, next: &Box3D) -> Self {
        let (a, b) = (prev.params(), next.params());
        let mut d = [0.0; 7];
        for k in 0..6 {
            d[k] = b[k] - a[k];
        }
        d[6] = wrap_angle(b[6] - a[6]);
        Self(d)
    }

    pub fn centre_norm(&self) -> f64 {
        (self.0[0].powi(2) + self.0[1].powi(2) + self.0[2].powi(2)).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Apply to a box; sizes keep a small positive floor.
    pub fn apply(&self, b: &Box3D) -> Box3D {
        let p = b.params();
        let mut q = [0.0; 7];
        for k in 0..7 {
            q[k] = p[k] + self.0[k];
        }
        for s in &mut q[3..6] {
            *s = s.max(1e-3);
        }
        q[6] = wrap_angle(q[6]);
        Box3D::from_params(q)
    }
}

/// The prediction loss applied to one delta pair.
pub fn delta_loss(pred: &BevDelta, gt: &BevDelta, class: &str, learn: &BevLearnables) -> Result<f64> {
    let beta = learn.beta(class)?;
    let mut inner = learn.alpha[6] * angle_loss(pred.0[6], gt.0[6]);
    for k in 0..6 {
        inner += learn.alpha[k] * huber(pred.0[k] - gt.0[k], learn.delta[k]);
    }
    Ok(beta * inner)
}

fn delta_loss_grad(pred: &BevDelta, gt: &BevDelta, beta: f64, learn: &BevLearnables) -> [f64; 7] {
    let mut g = [0.0; 7];
    for k in 0..6 {
        g[k] = beta * learn.alpha[k] * huber_grad(pred.0[k] - gt.0[k], learn.delta[k]);
    }
    g[6] = beta * learn.alpha[6] * angle_loss_grad(pred.0[6], gt.0[6]);
    g
}

#[derive(Debug, Clone, PartialEq)]
pub struct BevSample {
    pub class: String,
    pub history: Vec<BevDelta>,
    pub target: BevDelta,
}

/// Sliding windows over a box track.
pub fn bev_samples_from_track(class: &str, track: &[Box3D], window: usize) -> Vec<BevSample> {
    let deltas: Vec<BevDelta> = track.windows(2).map(|w| BevDelta::between(&w[0], &w[1])).collect();
    if window == 0 || deltas.len() <= window {
        return Vec::new();
    }
    (0..deltas.len() - window)
        .map(|s| BevSample {
            class: class.to_string(),
            history: deltas[s..s + window].to_vec(),
            target: deltas[s + window],
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BevWeights {
    pub cell: LstmCell,
    pub out_weights: Matrix,
    pub out_bias: Vec<f64>,
}

impl BevWeights {
    fn zeros_like(&self) -> Self {
        Self {
            cell: LstmCell::zeros(7, self.cell.hidden_dim()),
            out_weights: Matrix::zeros(7, self.cell.hidden_dim()),
            out_bias: vec![0.0; 7],
        }
    }
}

impl Parameters for BevWeights {
    fn tensors(&self) -> Vec<TensorRef<'_>> {
        let mut t = self.cell.tensors();
        t.push(TensorRef {
            name: "bev.out.weights".into(),
            rows: 7,
            cols: self.out_weights.cols(),
            data: self.out_weights.data(),
        });
        t.push(TensorRef {
            name: "bev.out.bias".into(),
            rows: 7,
            cols: 1,
            data: &self.out_bias,
        });
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut t = self.cell.tensors_mut();
        t.push(self.out_weights.data_mut());
        t.push(&mut self.out_bias);
        t
    }
}

/// LSTM over 7-dimensional deltas with a linear read-out.
#[derive(Debug, Clone)]
pub struct BevPredictor {
    weights: BevWeights,
    learn: BevLearnables,
    optimizer: Optimizer,
}

impl BevPredictor {
    pub fn new(hidden_dim: usize, learn: BevLearnables, learning_rate: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cell = LstmCell::random(7, hidden_dim, &mut rng);
        let scale = 1.0 / (hidden_dim as f64).sqrt();
        Self {
            weights: BevWeights {
                cell,
                out_weights: Matrix::random(7, hidden_dim, scale, &mut rng),
                out_bias: vec![0.0; 7],
            },
            learn,
            optimizer: Optimizer::new(OptimizerKind::Adam, learning_rate).with_clip_norm(Some(5.0)),
        }
    }

    pub fn weights(&self) -> &BevWeights {
        &self.weights
    }

    pub fn learnables(&self) -> &BevLearnables {
        &self.learn
    }

    pub fn hidden_dim(&self) -> usize {
        self.weights.cell.hidden_dim()
    }

    fn run(&self, history: &[BevDelta]) -> Result<(LstmState, Vec<crate::motion::lstm::StepCache>, BevDelta)> {
        let inputs: Vec<&[f64]> = history.iter().map(|d| &d.0[..]).collect();
        let (state, caches) = self
            .weights
            .cell
            .forward_sequence(&LstmState::zeros(self.hidden_dim()), &inputs)?;
        let mut y = [0.0; 7];
        self.weights.out_weights.affine_into(&state.hidden, &self.weights.out_bias, &mut y);
        Ok((state, caches, BevDelta(y)))
    }

    /// Next delta; an empty history predicts no change.
    pub fn predict_delta(&self, history: &[BevDelta]) -> Result<BevDelta> {
        if history.is_empty() {
            return Ok(BevDelta::ZERO);
        }
        Ok(self.run(history)?.2)
    }

    pub fn predict_next(&self, track: &[Box3D]) -> Result<Box3D> {
        let last = track.last().ok_or_else(|| invalid("empty 3D track"))?;
        let deltas: Vec<BevDelta> = track.windows(2).map(|w| BevDelta::between(&w[0], &w[1])).collect();
        Ok(self.predict_delta(&deltas)?.apply(last))
    }

    pub fn loss(&self, sample: &BevSample) -> Result<f64> {
        let pred = self.predict_delta(&sample.history)?;
        delta_loss(&pred, &sample.target, &sample.class, &self.learn)
    }

    pub fn loss_and_gradients(&self, sample: &BevSample) -> Result<(f64, BevWeights)> {
        if sample.history.is_empty() {
            return Err(invalid("training history must be non-empty"));
        }
        let beta = self.learn.beta(&sample.class)?;
        let (state, caches, pred) = self.run(&sample.history)?;
        let loss = delta_loss(&pred, &sample.target, &sample.class, &self.learn)?;
        let dy = delta_loss_grad(&pred, &sample.target, beta, &self.learn);
        let mut grads = self.weights.zeros_like();
        grads.out_weights.outer_acc(&dy, &state.hidden);
        for (b, d) in grads.out_bias.iter_mut().zip(&dy) {
            *b += d;
        }
        let mut d_hidden = vec![0.0; self.hidden_dim()];
        self.weights.out_weights.transpose_mul_acc(&dy, &mut d_hidden);
        let zeros = vec![0.0; self.hidden_dim()];
        self.weights.cell.backward(&caches, &d_hidden, &zeros, &mut grads.cell);
        Ok((loss, grads))
    }

    pub fn train_step(&mut self, sample: &BevSample) -> Result<f64> {
        let (loss, grads) = self.loss_and_gradients(sample)?;
        if !loss.is_finite() || !grads.all_finite() {
            return Err(Error::Diverged { step: 0, loss });
        }
        self.optimizer.apply(&mut self.weights, &grads);
        Ok(loss)
    }

    /// Shuffled passes with the same cosine learning-rate decay as the
    /// image-space motion model.
    pub fn fit(&mut self, samples: &[BevSample], steps: usize, seed: u64) -> Result<Vec<f64>> {
        if samples.is_empty() {
            return Err(invalid("no training samples"));
        }
        let base_lr = self.optimizer.learning_rate();
        let result = self.fit_scheduled(samples, steps, seed, base_lr);
        self.optimizer.set_learning_rate(base_lr);
        result
    }

    fn fit_scheduled(&mut self, samples: &[BevSample], steps: usize, seed: u64, base_lr: f64) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut cursor = order.len();
        let mut losses = Vec::with_capacity(steps);
        for step in 0..steps {
            if cursor == order.len() {
                order.shuffle(&mut rng);
                cursor = 0;
            }
            self.optimizer.set_learning_rate(base_lr * cosine_factor(step, steps));
            let loss = self.train_step(&samples[order[cursor]]).map_err(|e| match e {
                Error::Diverged { loss, .. } => Error::Diverged { step, loss },
                other => other,
            })?;
            cursor += 1;
            losses.push(loss);
        }
        Ok(losses)
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        let mut ck = Checkpoint::new(BEV_MAGIC);
        ck.push_scalar("hidden_dim", &[self.hidden_dim() as f64]);
        ck.push_scalar("learning_rate", &[self.optimizer.learning_rate()]);
        ck.push_scalar("alpha", &self.learn.alpha);
        ck.push_scalar("delta", &self.learn.delta);
        for (class, beta) in &self.learn.beta {
            ck.push_scalar(&format!("beta.{class}"), &[*beta]);
        }
        ck.push_parameters(&self.weights);
        ck
    }

    pub fn from_checkpoint(ck: &Checkpoint) -> Result<Self> {
        ck.expect_magic(BEV_MAGIC)?;
        let hidden = ck.scalar1("hidden_dim")? as usize;
        if hidden == 0 {
            return Err(Error::Checkpoint("hidden_dim must be positive".into()));
        }
        let mut learn = BevLearnables::new::<&str>(&[]);
        learn.alpha = ck
            .scalar("alpha")?
            .try_into()
            .map_err(|_| Error::Checkpoint("alpha needs 7 values".into()))?;
        learn.delta = ck
            .scalar("delta")?
            .try_into()
            .map_err(|_| Error::Checkpoint("delta needs 6 values".into()))?;
        for (name, v) in &ck.scalars {
            if let Some(class) = name.strip_prefix("beta.") {
                learn.beta.insert(class.to_string(), v.first().copied().unwrap_or(1.0));
            }
        }
        let mut model = Self::new(hidden, learn, ck.scalar1("learning_rate")?, 0);
        ck.load_parameters(&mut model.weights)?;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn track(v: [f64; 3], n: usize) -> Vec<Box3D> {
        (0..n)
            .map(|i| {
                let t = i as f64;
                Box3D::new([v[0] * t, 1.0 + v[1] * t, 20.0 + v[2] * t], [1.5, 1.8, 4.2], 0.3).unwrap()
            })
            .collect()
    }

    #[test]
    fn empty_history_predicts_zero() {
        let m = BevPredictor::new(4, BevLearnables::new(&["car"]), 1e-3, 1);
        assert_eq!(m.predict_delta(&[]).unwrap(), BevDelta::ZERO);
    }

    #[test]
    fn wrapped_yaw_delta_is_small() {
        let a = Box3D::new([0.0; 3], [1.0; 3], 3.1).unwrap();
        let b = Box3D::new([0.0; 3], [1.0; 3], -3.1).unwrap();
        let d = BevDelta::between(&a, &b);
        assert!((d.0[6] - (2.0 * std::f64::consts::PI - 6.2)).abs() < 1e-12);
    }

    #[test]
    fn training_reduces_loss() {
        let learn = BevLearnables::new(&["car"]);
        let mut m = BevPredictor::new(8, learn, 5e-3, 2);
        let samples = bev_samples_from_track("car", &track([0.4, 0.0, 0.8], 20), 4);
        let before: f64 = samples.iter().map(|s| m.loss(s).unwrap()).sum();
        m.fit(&samples, 300, 3).unwrap();
        let after: f64 = samples.iter().map(|s| m.loss(s).unwrap()).sum();
        assert!(after < before);
    }

    #[test]
    fn checkpoint_round_trip() {
        let m = BevPredictor::new(3, BevLearnables::new(&["car", "pedestrian"]), 1e-3, 4);
        let text = m.to_checkpoint().to_text();
        let back = BevPredictor::from_checkpoint(&Checkpoint::from_text(&text).unwrap()).unwrap();
        assert_eq!(back.weights(), m.weights());
        assert_eq!(back.learnables().beta, m.learnables().beta);
    }
}
