//! Single-layer LSTM cell with explicit backpropagation through time.
//!
//! Gate pre-activations are stacked as `[input, forget, candidate, output]`
//! in one `4H x (I + H)` matrix acting on the concatenation `[x; h]`.

use rand::Rng;

use crate::error::{Error, Result};

use super::tensor::{sigmoid, Matrix, Parameters, TensorRef};

#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell {
    input_dim: usize,
    hidden_dim: usize,
    pub(crate) weights: Matrix,
    pub(crate) bias: Vec<f64>,
}

/// Hidden and cell vectors; the hidden vector is the temporal feature.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub hidden: Vec<f64>,
    pub cell: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden_dim: usize) -> Self {
        Self {
            hidden: vec![0.0; hidden_dim],
            cell: vec![0.0; hidden_dim],
        }
    }
}

/// Activations of one step, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct StepCache {
    concat: Vec<f64>,
    gates: Vec<f64>,
    cell_prev: Vec<f64>,
    cell_tanh: Vec<f64>,
}

impl LstmCell {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        Self {
            input_dim,
            hidden_dim,
            weights: Matrix::zeros(4 * hidden_dim, input_dim + hidden_dim),
            bias: vec![0.0; 4 * hidden_dim],
        }
    }

    /// Uniform init scaled by `1/sqrt(H)`, forget-gate bias 1.
    pub fn random<R: Rng + ?Sized>(input_dim: usize, hidden_dim: usize, rng: &mut R) -> Self {
        let scale = 1.0 / (hidden_dim as f64).sqrt();
        let mut bias = vec![0.0; 4 * hidden_dim];
        bias[hidden_dim..2 * hidden_dim].fill(1.0);
        Self {
            input_dim,
            hidden_dim,
            weights: Matrix::random(4 * hidden_dim, input_dim + hidden_dim, scale, rng),
            bias,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub(crate) fn from_parts(input_dim: usize, hidden_dim: usize, weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if weights.rows() != 4 * hidden_dim || weights.cols() != input_dim + hidden_dim || bias.len() != 4 * hidden_dim {
            return Err(Error::Shape("LSTM weights do not match dimensions".into()));
        }
        Ok(Self {
            input_dim,
            hidden_dim,
            weights,
            bias,
        })
    }

    /// One gate update. Rejects non-finite input.
    pub fn step(&self, state: &LstmState, input: &[f64]) -> Result<LstmState> {
        Ok(self.step_cached(state, input)?.0)
    }

    pub fn step_cached(&self, state: &LstmState, input: &[f64]) -> Result<(LstmState, StepCache)> {
        let h = self.hidden_dim;
        if input.len() != self.input_dim {
            return Err(Error::Shape(format!(
                "LSTM input has length {}, expected {}",
                input.len(),
                self.input_dim
            )));
        }
        if state.hidden.len() != h || state.cell.len() != h {
            return Err(Error::Shape(format!("LSTM state must have length {h}")));
        }
        if input.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("LSTM input"));
        }
        let mut concat = Vec::with_capacity(self.input_dim + h);
        concat.extend_from_slice(input);
        concat.extend_from_slice(&state.hidden);
        let mut gates = vec![0.0; 4 * h];
        self.weights.affine_into(&concat, &self.bias, &mut gates);
        for k in 0..h {
            gates[k] = sigmoid(gates[k]);
            gates[h + k] = sigmoid(gates[h + k]);
            gates[2 * h + k] = gates[2 * h + k].tanh();
            gates[3 * h + k] = sigmoid(gates[3 * h + k]);
        }
        let mut cell = vec![0.0; h];
        let mut hidden = vec![0.0; h];
        let mut cell_tanh = vec![0.0; h];
        for k in 0..h {
            cell[k] = gates[h + k] * state.cell[k] + gates[k] * gates[2 * h + k];
            cell_tanh[k] = cell[k].tanh();
            hidden[k] = gates[3 * h + k] * cell_tanh[k];
        }
        Ok((
            LstmState { hidden, cell },
            StepCache {
                concat,
                gates,
                cell_prev: state.cell.clone(),
                cell_tanh,
            },
        ))
    }

    /// Run a whole sequence from `initial`, keeping every step's cache.
    pub fn forward_sequence(&self, initial: &LstmState, inputs: &[&[f64]]) -> Result<(LstmState, Vec<StepCache>)> {
        let mut state = initial.clone();
        let mut caches = Vec::with_capacity(inputs.len());
        for x in inputs {
            let (next, cache) = self.step_cached(&state, x)?;
            state = next;
            caches.push(cache);
        }
        Ok((state, caches))
    }

    /// Backpropagate gradients on the final hidden and cell vectors through
    /// `caches`. Weight gradients are accumulated into `grads`; returns the
    /// gradient for every step's input and for the initial state.
    pub fn backward(
        &self,
        caches: &[StepCache],
        d_hidden: &[f64],
        d_cell: &[f64],
        grads: &mut LstmCell,
    ) -> (Vec<Vec<f64>>, LstmState) {
        let h = self.hidden_dim;
        let mut dh = d_hidden.to_vec();
        let mut dc = d_cell.to_vec();
        let mut dz = vec![0.0; 4 * h];
        let mut d_inputs = vec![Vec::new(); caches.len()];
        for (t, cache) in caches.iter().enumerate().rev() {
            let g = &cache.gates;
            for k in 0..h {
                let (i, f, cand, o) = (g[k], g[h + k], g[2 * h + k], g[3 * h + k]);
                let tc = cache.cell_tanh[k];
                let dct = dc[k] + dh[k] * o * (1.0 - tc * tc);
                dz[k] = dct * cand * i * (1.0 - i);
                dz[h + k] = dct * cache.cell_prev[k] * f * (1.0 - f);
                dz[2 * h + k] = dct * i * (1.0 - cand * cand);
                dz[3 * h + k] = dh[k] * tc * o * (1.0 - o);
                dc[k] = dct * f;
            }
            grads.weights.outer_acc(&dz, &cache.concat);
            for (b, d) in grads.bias.iter_mut().zip(&dz) {
                *b += d;
            }
            let mut d_concat = vec![0.0; self.input_dim + h];
            self.weights.transpose_mul_acc(&dz, &mut d_concat);
            dh.copy_from_slice(&d_concat[self.input_dim..]);
            d_concat.truncate(self.input_dim);
            d_inputs[t] = d_concat;
        }
        (d_inputs, LstmState { hidden: dh, cell: dc })
    }
}

impl Parameters for LstmCell {
    fn tensors(&self) -> Vec<TensorRef<'_>> {
        vec![
            TensorRef {
                name: "lstm.weights".into(),
                rows: self.weights.rows(),
                cols: self.weights.cols(),
                data: self.weights.data(),
            },
            TensorRef {
                name: "lstm.bias".into(),
                rows: self.bias.len(),
                cols: 1,
                data: &self.bias,
            },
        ]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![self.weights.data_mut(), &mut self.bias]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_weights_give_zero_hidden() {
        let cell = LstmCell::zeros(4, 6);
        let s = cell.step(&LstmState::zeros(6), &[0.3, -0.2, 0.9, 0.1]).unwrap();
        assert!(s.hidden.iter().all(|&v| v == 0.0));
        assert!(s.cell.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        let cell = LstmCell::zeros(4, 3);
        assert!(matches!(
            cell.step(&LstmState::zeros(3), &[f64::NAN, 0.0, 0.0, 0.0]),
            Err(Error::NonFinite(_))
        ));
        assert!(cell.step(&LstmState::zeros(3), &[0.0; 3]).is_err());
        assert!(cell.step(&LstmState::zeros(2), &[0.0; 4]).is_err());
    }

    #[test]
    fn constant_input_reaches_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut cell = LstmCell::random(4, 8, &mut rng);
        // Shrink recurrent weights and bias the forget gate closed so the
        // update map is a contraction.
        for r in 0..cell.weights.rows() {
            for c in 4..cell.weights.cols() {
                let v = cell.weights.get(r, c) * 0.2;
                cell.weights.set(r, c, v);
            }
        }
        cell.bias[8..16].fill(-1.0);
        let x = [0.05, -0.02, 0.01, 0.0];
        let mut s = LstmState::zeros(8);
        let mut last_change = f64::INFINITY;
        for _ in 0..500 {
            let next = cell.step(&s, &x).unwrap();
            last_change = next
                .hidden
                .iter()
                .chain(&next.cell)
                .zip(s.hidden.iter().chain(&s.cell))
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            s = next;
        }
        assert!(last_change < 1e-9, "change {last_change}");
    }
}
