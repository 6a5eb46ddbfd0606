use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::BBox2D;

use super::anchors::{decode, encode_target, AnchorSet, DeltaVector};
use super::heads::{AnchorHeads, MotionPredictorOutput};
use super::kalman::{KalmanConfig, KalmanState};
use super::loss::{
    classification_loss_grad, regression_loss_grad, total_loss, LossWeights,
};
use super::lstm::{LstmCell, LstmState, StepCache};
use super::optim::{Optimizer, OptimizerKind};
use super::tensor::{Parameters, TensorRef};

/// Smallest box extent a prediction may produce.
pub const MIN_EXTENT: f64 = 1e-4;

/// Learning-rate multiplier reached at the end of [`MotionModel::fit`].
pub const FINAL_LR_FRACTION: f64 = 0.05;

pub(crate) fn cosine_factor(step: usize, steps: usize) -> f64 {
    let t = step as f64 / steps.max(1) as f64;
    FINAL_LR_FRACTION + (1.0 - FINAL_LR_FRACTION) * 0.5 * (1.0 + (std::f64::consts::PI * t).cos())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionConfig {
    pub hidden_dim: usize,
    /// Longest delta history the model is trained on and fed online.
    pub window: usize,
    pub anchors: AnchorSet,
    pub loss: LossWeights,
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub clip_norm: Option<f64>,
    pub seed: u64,
}

impl Default for MotionConfig {
    fn default() -> Self {
        Self {
            hidden_dim: 64,
            window: 10,
            anchors: AnchorSet::symmetric(),
            loss: LossWeights::default(),
            optimizer: OptimizerKind::Adam,
            learning_rate: 2e-3,
            clip_norm: Some(5.0),
            seed: 0,
        }
    }
}

/// Trainable weights: the LSTM cell and the four anchor heads.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionWeights {
    pub cell: LstmCell,
    pub heads: AnchorHeads,
}

impl MotionWeights {
    pub fn zeros_like(&self) -> Self {
        Self {
            cell: LstmCell::zeros(self.cell.input_dim(), self.cell.hidden_dim()),
            heads: AnchorHeads::zeros(self.heads.bins(), self.heads.hidden_dim()),
        }
    }
}

impl Parameters for MotionWeights {
    fn tensors(&self) -> Vec<TensorRef<'_>> {
        let mut t = self.cell.tensors();
        t.extend(self.heads.tensors());
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut t = self.cell.tensors_mut();
        t.extend(self.heads.tensors_mut());
        t
    }
}

/// One supervised example: observed deltas and the next-frame delta.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    pub history: Vec<DeltaVector>,
    pub target: DeltaVector,
}

/// Every delta of a box track after the first, paired with the up to
/// `window` deltas before it. The short histories at the start of the
/// track are the ones a newly created track presents online.
pub fn samples_from_track(track: &[BBox2D], window: usize) -> Vec<TrainingSample> {
    let deltas: Vec<DeltaVector> = track.windows(2).map(|w| DeltaVector::between(&w[0], &w[1])).collect();
    if window == 0 {
        return Vec::new();
    }
    (1..deltas.len())
        .map(|end| TrainingSample {
            history: deltas[end.saturating_sub(window)..end].to_vec(),
            target: deltas[end],
        })
        .collect()
}

/// LSTM motion predictor with anchor classification and masked regression.
#[derive(Debug, Clone)]
pub struct MotionModel {
    weights: MotionWeights,
    anchors: AnchorSet,
    loss: LossWeights,
    optimizer: Optimizer,
    window: usize,
    seed: u64,
}

struct ForwardPass {
    caches: Vec<StepCache>,
    state: LstmState,
    output: MotionPredictorOutput,
}

impl MotionModel {
    pub fn new(config: &MotionConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let weights = MotionWeights {
            cell: LstmCell::random(4, config.hidden_dim, &mut rng),
            heads: AnchorHeads::random(config.anchors.len(), config.hidden_dim, &mut rng),
        };
        Self::from_weights(weights, config)
    }

    pub fn from_weights(weights: MotionWeights, config: &MotionConfig) -> Self {
        Self {
            weights,
            anchors: config.anchors.clone(),
            loss: config.loss,
            optimizer: Optimizer::new(config.optimizer, config.learning_rate).with_clip_norm(config.clip_norm),
            window: config.window.max(1),
            seed: config.seed,
        }
    }

    pub fn weights(&self) -> &MotionWeights {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut MotionWeights {
        &mut self.weights
    }

    pub fn anchors(&self) -> &AnchorSet {
        &self.anchors
    }

    pub fn loss_weights(&self) -> LossWeights {
        self.loss
    }

    pub fn hidden_dim(&self) -> usize {
        self.weights.cell.hidden_dim()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn optimizer(&self) -> &Optimizer {
        &self.optimizer
    }

    pub fn config(&self) -> MotionConfig {
        MotionConfig {
            hidden_dim: self.hidden_dim(),
            window: self.window,
            anchors: self.anchors.clone(),
            loss: self.loss,
            optimizer: self.optimizer.kind(),
            learning_rate: self.optimizer.learning_rate(),
            clip_norm: self.optimizer.clip_norm(),
            seed: self.seed,
        }
    }

    /// Reset the optimizer, e.g. to change the learning rate.
    pub fn set_optimizer(&mut self, optimizer: Optimizer) {
        self.optimizer = optimizer;
    }

    /// One LSTM update on a delta.
    pub fn lstm_step(&self, state: &LstmState, input: &DeltaVector) -> Result<LstmState> {
        self.weights.cell.step(state, &input.values())
    }

    pub fn heads_forward(&self, feature: &[f64]) -> Result<MotionPredictorOutput> {
        self.weights.heads.forward(feature)
    }

    fn forward(&self, sequence: &[DeltaVector]) -> Result<ForwardPass> {
        if sequence.is_empty() {
            return Err(invalid("motion sequence must contain at least one delta"));
        }
        let inputs: Vec<[f64; 4]> = sequence.iter().map(|d| d.values()).collect();
        let refs: Vec<&[f64]> = inputs.iter().map(|x| &x[..]).collect();
        let (state, caches) = self
            .weights
            .cell
            .forward_sequence(&LstmState::zeros(self.hidden_dim()), &refs)?;
        let output = self.weights.heads.forward(&state.hidden)?;
        Ok(ForwardPass { caches, state, output })
    }

    /// Heads output after running `sequence` from a zero state.
    pub fn predict_output(&self, sequence: &[DeltaVector]) -> Result<MotionPredictorOutput> {
        Ok(self.forward(sequence)?.output)
    }

    pub fn predict_delta(&self, sequence: &[DeltaVector]) -> Result<DeltaVector> {
        let out = self.predict_output(sequence)?;
        decode(&out.c_out, &out.r_out, &self.anchors)
    }

    pub fn loss(&self, sequence: &[DeltaVector], target: &DeltaVector) -> Result<f64> {
        let out = self.predict_output(sequence)?;
        let t = encode_target(target, &self.anchors);
        Ok(total_loss(&out.c_out, &out.r_out, &t.c_true, &t.r_true, &self.loss))
    }

    /// Loss and its gradient with respect to every weight (BPTT).
    pub fn loss_and_gradients(&self, sequence: &[DeltaVector], target: &DeltaVector) -> Result<(f64, MotionWeights)> {
        let pass = self.forward(sequence)?;
        let t = encode_target(target, &self.anchors);
        let out = &pass.output;
        let loss = total_loss(&out.c_out, &out.r_out, &t.c_true, &t.r_true, &self.loss);

        let mut d_c = classification_loss_grad(&out.c_out, &t.c_true);
        d_c.data_mut().iter_mut().for_each(|g| *g *= self.loss.lambda_c);
        let mut d_r = regression_loss_grad(&out.c_out, &out.r_out, &t.r_true, self.loss.huber_delta);
        d_r.data_mut().iter_mut().for_each(|g| *g *= self.loss.lambda_r);

        let mut grads = self.weights.zeros_like();
        let d_hidden = self
            .weights
            .heads
            .backward(&pass.state.hidden, out, &d_c, &d_r, &mut grads.heads);
        let zeros = vec![0.0; self.hidden_dim()];
        self.weights
            .cell
            .backward(&pass.caches, &d_hidden, &zeros, &mut grads.cell);
        Ok((loss, grads))
    }

    /// One optimizer update on a single sequence; returns the pre-update loss.
    pub fn train_step(&mut self, sequence: &[DeltaVector], target: &DeltaVector) -> Result<f64> {
        let (loss, grads) = self.loss_and_gradients(sequence, target)?;
        if !loss.is_finite() || !grads.all_finite() {
            return Err(Error::Diverged { step: 0, loss });
        }
        self.optimizer.apply(&mut self.weights, &grads);
        if !self.weights.all_finite() {
            return Err(Error::Diverged { step: 0, loss });
        }
        Ok(loss)
    }

    /// Shuffled passes over `samples` for `steps` updates. The learning
    /// rate follows a cosine decay to [`FINAL_LR_FRACTION`] of its base value
    /// and is restored afterwards. Returns the per-step pre-update losses.
    pub fn fit(&mut self, samples: &[TrainingSample], steps: usize, seed: u64) -> Result<Vec<f64>> {
        if samples.is_empty() {
            return Err(invalid("no training samples"));
        }
        let base_lr = self.optimizer.learning_rate();
        let result = self.fit_scheduled(samples, steps, seed, base_lr);
        self.optimizer.set_learning_rate(base_lr);
        result
    }

    fn fit_scheduled(&mut self, samples: &[TrainingSample], steps: usize, seed: u64, base_lr: f64) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut losses = Vec::with_capacity(steps);
        let mut cursor = order.len();
        for step in 0..steps {
            if cursor == order.len() {
                order.shuffle(&mut rng);
                cursor = 0;
            }
            let s = &samples[order[cursor]];
            cursor += 1;
            self.optimizer.set_learning_rate(base_lr * cosine_factor(step, steps));
            let loss = self.train_step(&s.history, &s.target).map_err(|e| match e {
                Error::Diverged { loss, .. } => Error::Diverged { step, loss },
                other => other,
            })?;
            losses.push(loss);
        }
        Ok(losses)
    }

    /// Next-frame box from a box history, of which the last `window`
    /// deltas are used. Histories shorter than two boxes fall back to the
    /// Kalman baseline.
    pub fn predict_next(&self, history: &[BBox2D]) -> Result<BBox2D> {
        match history {
            [] => Err(invalid("empty box history")),
            [single] => {
                let cfg = KalmanConfig::default();
                let mut state = KalmanState::initiate(single, &cfg);
                state.predict(&cfg);
                Ok(state.box_estimate())
            }
            _ => {
                let recent = &history[history.len().saturating_sub(self.window + 1)..];
                let deltas: Vec<DeltaVector> = recent.windows(2).map(|w| DeltaVector::between(&w[0], &w[1])).collect();
                let delta = self.predict_delta(&deltas)?;
                Ok(history[history.len() - 1].shifted(delta.values(), MIN_EXTENT))
            }
        }
    }

    /// Mean over parameters of the selected bin's probability.
    pub fn confidence(out: &MotionPredictorOutput) -> f64 {
        let p = out.c_out.rows();
        (0..4)
            .map(|j| (0..p).map(|k| out.c_out.get(k, j)).fold(0.0, f64::max))
            .sum::<f64>()
            / 4.0
    }

    pub fn random_sample<R: Rng + ?Sized>(&self, samples: &[TrainingSample], rng: &mut R) -> TrainingSample {
        samples[rng.random_range(0..samples.len())].clone()
    }
}

/// Per-track online state for the LSTM predictor inside the tracker.
///
/// Keeps the last `window` deltas and predicts from them exactly as
/// [`MotionModel::predict_next`] does from the matching box history.
#[derive(Debug, Clone)]
pub struct LstmTrackState {
    deltas: VecDeque<DeltaVector>,
    last_box: BBox2D,
    pending: Option<(BBox2D, DeltaVector)>,
}

impl LstmTrackState {
    pub fn new(model: &MotionModel, initial: BBox2D) -> Self {
        Self {
            deltas: VecDeque::with_capacity(model.window() + 1),
            last_box: initial,
            pending: None,
        }
    }

    /// Predicted box for the next frame.
    pub fn predict(&mut self, model: &MotionModel) -> Result<BBox2D> {
        let (bbox, delta) = if self.deltas.is_empty() {
            (self.last_box, DeltaVector::ZERO)
        } else {
            let history: Vec<DeltaVector> = self.deltas.iter().copied().collect();
            let delta = model.predict_delta(&history)?;
            (self.last_box.shifted(delta.values(), MIN_EXTENT), delta)
        };
        self.pending = Some((bbox, delta));
        Ok(bbox)
    }

    fn push(&mut self, model: &MotionModel, delta: DeltaVector) {
        self.deltas.push_back(delta);
        while self.deltas.len() > model.window() {
            self.deltas.pop_front();
        }
    }

    /// Consume a matched measurement.
    pub fn update(&mut self, model: &MotionModel, measurement: BBox2D) -> Result<()> {
        self.push(model, DeltaVector::between(&self.last_box, &measurement));
        self.last_box = measurement;
        self.pending = None;
        Ok(())
    }

    /// No measurement this frame: coast on the pending prediction.
    pub fn mark_missed(&mut self, model: &MotionModel) -> Result<()> {
        if let Some((bbox, delta)) = self.pending.take() {
            if !self.deltas.is_empty() {
                self.push(model, delta);
            }
            self.last_box = bbox;
        }
        Ok(())
    }

    pub fn box_estimate(&self) -> BBox2D {
        self.last_box
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(seed: u64) -> MotionConfig {
        MotionConfig {
            hidden_dim: 8,
            seed,
            ..MotionConfig::default()
        }
    }

    fn linear_track(start: f64, v: f64, n: usize) -> Vec<BBox2D> {
        (0..n).map(|i| BBox2D::new(start + v * i as f64, 0.5, 0.2, 0.1).unwrap()).collect()
    }

    #[test]
    fn zero_learning_rate_leaves_model_unchanged() {
        let mut cfg = small_config(1);
        cfg.learning_rate = 0.0;
        let mut m = MotionModel::new(&cfg);
        let before = m.weights().clone();
        let seq = vec![DeltaVector::new([0.01, 0.0, 0.0, 0.0]).unwrap(); 3];
        m.train_step(&seq, &seq[0]).unwrap();
        assert_eq!(&before, m.weights());
    }

    #[test]
    fn empty_sequence_rejected() {
        let m = MotionModel::new(&small_config(2));
        assert!(m.train_step_clone(&[]).is_err());
    }

    impl MotionModel {
        fn train_step_clone(&self, seq: &[DeltaVector]) -> Result<f64> {
            self.clone().train_step(seq, &DeltaVector::ZERO)
        }
    }

    #[test]
    fn training_reduces_loss_on_constant_velocity() {
        let mut m = MotionModel::new(&small_config(3));
        let track = linear_track(0.1, 0.02, 30);
        let samples = samples_from_track(&track, 5);
        let initial = m.loss(&samples[0].history, &samples[0].target).unwrap();
        m.fit(&samples, 200, 9).unwrap();
        let after = m.loss(&samples[0].history, &samples[0].target).unwrap();
        assert!(after < initial, "{after} >= {initial}");
    }

    #[test]
    fn short_history_falls_back_to_kalman() {
        let m = MotionModel::new(&small_config(4));
        let b = BBox2D::new(0.3, 0.4, 0.2, 0.1).unwrap();
        let p = m.predict_next(&[b]).unwrap();
        assert!((p.cx() - b.cx()).abs() < 1e-12);
        assert!(m.predict_next(&[]).is_err());
    }

    #[test]
    fn online_state_matches_batch_prediction() {
        // Longer than the window, so the online history is truncated.
        let m = MotionModel::new(&MotionConfig {
            window: 3,
            ..small_config(5)
        });
        let track = linear_track(0.2, 0.015, 12);
        let mut online = LstmTrackState::new(&m, track[0]);
        for (k, b) in track.iter().enumerate().skip(1) {
            let predicted = online.predict(&m).unwrap();
            if k >= 2 {
                let batch = m.predict_next(&track[..k]).unwrap();
                assert!((predicted.cx() - batch.cx()).abs() < 1e-12);
                assert!((predicted.w() - batch.w()).abs() < 1e-12);
            }
            online.update(&m, *b).unwrap();
        }
    }

    #[test]
    fn predictions_keep_positive_extent() {
        let m = MotionModel::new(&small_config(6));
        let track: Vec<BBox2D> = (0..6)
            .map(|i| BBox2D::new(0.5, 0.5, 0.01 - 0.0015 * i as f64, 0.01 - 0.0015 * i as f64).unwrap())
            .collect();
        let p = m.predict_next(&track).unwrap();
        assert!(p.h() > 0.0 && p.w() > 0.0);
    }

    #[test]
    fn windows_cover_track() {
        let track = linear_track(0.0, 0.01, 10);
        let s = samples_from_track(&track, 4);
        assert_eq!(s.len(), 8);
        let lens: Vec<usize> = s.iter().map(|x| x.history.len()).collect();
        assert_eq!(lens, [1, 2, 3, 4, 4, 4, 4, 4]);
        assert!((s[0].target.values()[0] - 0.01).abs() < 1e-12);
        assert!(samples_from_track(&track[..2], 4).is_empty());
        assert!(samples_from_track(&track, 0).is_empty());
    }
}
