//! Plain-text checkpoints of named weight arrays.
//!
//! ```text
//! siamtrack-motion 1
//! scalar hidden_dim 64
//! scalar anchors -8e-1 -5e-1 -1e-1 0e0 1e-1 5e-1 8e-1
//! tensor lstm.weights 256 68
//! <row 0 values>
//! ...
//! end
//! ```
//!
//! Values are written in shortest round-trip exponent form, so saving and
//! loading reproduces every weight bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::anchors::AnchorSet;
use super::heads::{AnchorHeads, DenseHead};
use super::loss::LossWeights;
use super::lstm::LstmCell;
use super::model::{MotionConfig, MotionModel, MotionWeights};
use super::optim::OptimizerKind;
use super::tensor::{Matrix, Parameters};

pub const MOTION_MAGIC: &str = "siamtrack-motion";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct NamedTensor {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Checkpoint {
    pub magic: String,
    pub scalars: Vec<(String, Vec<f64>)>,
    pub tensors: Vec<NamedTensor>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

impl Checkpoint {
    pub fn new(magic: &str) -> Self {
        Self {
            magic: magic.to_string(),
            ..Self::default()
        }
    }

    pub fn push_scalar(&mut self, name: &str, values: &[f64]) {
        self.scalars.push((name.to_string(), values.to_vec()));
    }

    pub fn push_parameters<P: Parameters + ?Sized>(&mut self, params: &P) {
        for t in params.tensors() {
            self.tensors.push(NamedTensor {
                name: t.name,
                rows: t.rows,
                cols: t.cols,
                data: t.data.to_vec(),
            });
        }
    }

    pub fn scalar(&self, name: &str) -> Result<&[f64]> {
        self.scalars
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| bad(format!("missing scalar `{name}`")))
    }

    pub fn scalar1(&self, name: &str) -> Result<f64> {
        match self.scalar(name)? {
            [v] => Ok(*v),
            other => Err(bad(format!("scalar `{name}` has {} values", other.len()))),
        }
    }

    pub fn tensor(&self, name: &str) -> Result<&NamedTensor> {
        self.tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| bad(format!("missing tensor `{name}`")))
    }

    /// Copy stored tensors into `params`, checking names and shapes.
    pub fn load_parameters<P: Parameters + ?Sized>(&self, params: &mut P) -> Result<()> {
        let layout: Vec<(String, usize, usize)> = params.tensors().into_iter().map(|t| (t.name, t.rows, t.cols)).collect();
        let mut sources = Vec::with_capacity(layout.len());
        for (name, rows, cols) in &layout {
            let t = self.tensor(name)?;
            if t.rows != *rows || t.cols != *cols {
                return Err(bad(format!(
                    "tensor `{name}` is {}x{}, expected {rows}x{cols}",
                    t.rows, t.cols
                )));
            }
            sources.push(&t.data);
        }
        for (dst, src) in params.tensors_mut().into_iter().zip(sources) {
            dst.copy_from_slice(src);
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.magic, FORMAT_VERSION);
        for (name, values) in &self.scalars {
            let _ = write!(out, "scalar {name}");
            for v in values {
                let _ = write!(out, " {v:e}");
            }
            out.push('\n');
        }
        for t in &self.tensors {
            let _ = writeln!(out, "tensor {} {} {}", t.name, t.rows, t.cols);
            for r in 0..t.rows {
                let row = &t.data[r * t.cols..(r + 1) * t.cols];
                let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| bad("empty checkpoint"))?;
        let mut parts = header.split_whitespace();
        let magic = parts.next().ok_or_else(|| bad("missing magic"))?.to_string();
        let version: u32 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("missing format version"))?;
        if version != FORMAT_VERSION {
            return Err(bad(format!("unsupported format version {version}")));
        }
        let parse_f = |s: &str, line: usize| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| bad(format!("line {}: bad number `{s}`", line + 1)))
        };
        let mut ck = Checkpoint::new(&magic);
        let mut finished = false;
        while let Some((ln, line)) = lines.next() {
            let mut fields = line.split_whitespace();
            match fields.next() {
                Some("scalar") => {
                    let name = fields.next().ok_or_else(|| bad(format!("line {}: scalar without name", ln + 1)))?;
                    let values = fields.map(|s| parse_f(s, ln)).collect::<Result<Vec<_>>>()?;
                    ck.scalars.push((name.to_string(), values));
                }
                Some("tensor") => {
                    let name = fields.next().ok_or_else(|| bad(format!("line {}: tensor without name", ln + 1)))?;
                    let dims: Vec<usize> = fields.filter_map(|s| s.parse().ok()).collect();
                    let [rows, cols] = dims[..] else {
                        return Err(bad(format!("line {}: tensor header needs rows and cols", ln + 1)));
                    };
                    let mut data = Vec::with_capacity(rows * cols);
                    for _ in 0..rows {
                        let (rl, row) = lines.next().ok_or_else(|| bad(format!("tensor `{name}` truncated")))?;
                        let before = data.len();
                        for s in row.split_whitespace() {
                            data.push(parse_f(s, rl)?);
                        }
                        if data.len() - before != cols {
                            return Err(bad(format!("line {}: expected {cols} values", rl + 1)));
                        }
                    }
                    ck.tensors.push(NamedTensor {
                        name: name.to_string(),
                        rows,
                        cols,
                        data,
                    });
                }
                Some("end") => {
                    finished = true;
                    break;
                }
                None => continue,
                Some(other) => return Err(bad(format!("line {}: unexpected `{other}`", ln + 1))),
            }
        }
        if !finished {
            return Err(bad("missing `end` marker"));
        }
        Ok(ck)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&crate::error::read_text(path)?)
    }

    pub fn expect_magic(&self, magic: &str) -> Result<()> {
        if self.magic != magic {
            return Err(bad(format!("expected `{magic}` checkpoint, found `{}`", self.magic)));
        }
        Ok(())
    }
}

impl MotionModel {
    pub fn to_checkpoint(&self) -> Checkpoint {
        let mut ck = Checkpoint::new(MOTION_MAGIC);
        ck.push_scalar("hidden_dim", &[self.hidden_dim() as f64]);
        ck.push_scalar("window", &[self.window() as f64]);
        ck.push_scalar("anchors", self.anchors().values());
        let w = self.loss_weights();
        ck.push_scalar("lambda_c", &[w.lambda_c]);
        ck.push_scalar("lambda_r", &[w.lambda_r]);
        ck.push_scalar("huber_delta", &[w.huber_delta]);
        ck.push_scalar("learning_rate", &[self.optimizer().learning_rate()]);
        ck.push_parameters(self.weights());
        ck
    }

    pub fn from_checkpoint(ck: &Checkpoint) -> Result<Self> {
        ck.expect_magic(MOTION_MAGIC)?;
        let hidden = ck.scalar1("hidden_dim")?;
        if !(hidden >= 1.0 && hidden.fract() == 0.0) {
            return Err(bad("hidden_dim must be a positive integer"));
        }
        let hidden = hidden as usize;
        let window = ck.scalar1("window")?;
        if !(window >= 1.0 && window.fract() == 0.0) {
            return Err(bad("window must be a positive integer"));
        }
        let anchors = AnchorSet::new(ck.scalar("anchors")?.to_vec()).map_err(|e| bad(e.to_string()))?;
        let p = anchors.len();
        let config = MotionConfig {
            hidden_dim: hidden,
            window: window as usize,
            anchors,
            loss: LossWeights {
                lambda_c: ck.scalar1("lambda_c")?,
                lambda_r: ck.scalar1("lambda_r")?,
                huber_delta: ck.scalar1("huber_delta")?,
            },
            optimizer: OptimizerKind::Adam,
            learning_rate: ck.scalar1("learning_rate")?,
            ..MotionConfig::default()
        };
        let lstm = LstmCell::from_parts(4, hidden, Matrix::zeros(4 * hidden, 4 + hidden), vec![0.0; 4 * hidden])?;
        let heads = AnchorHeads::from_parts(
            p,
            hidden,
            (0..4)
                .map(|_| DenseHead {
                    weights: Matrix::zeros(2 * p, hidden),
                    bias: vec![0.0; 2 * p],
                })
                .collect(),
        )?;
        let mut weights = MotionWeights { cell: lstm, heads };
        ck.load_parameters(&mut weights)?;
        if !weights.all_finite() {
            return Err(Error::NonFinite("checkpoint weights"));
        }
        Ok(MotionModel::from_weights(weights, &config))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_checkpoint().save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_checkpoint(&Checkpoint::load(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let model = MotionModel::new(&MotionConfig {
            hidden_dim: 5,
            seed: 17,
            ..MotionConfig::default()
        });
        let text = model.to_checkpoint().to_text();
        let back = MotionModel::from_checkpoint(&Checkpoint::from_text(&text).unwrap()).unwrap();
        let a: Vec<u64> = model.weights().flatten().iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = back.weights().flatten().iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
        assert_eq!(back.anchors(), model.anchors());
        assert_eq!(back.to_checkpoint().to_text(), text);
    }

    #[test]
    fn rejects_wrong_magic_and_truncation() {
        let model = MotionModel::new(&MotionConfig {
            hidden_dim: 3,
            ..MotionConfig::default()
        });
        let text = model.to_checkpoint().to_text();
        let wrong = text.replacen(MOTION_MAGIC, "other-model", 1);
        assert!(MotionModel::from_checkpoint(&Checkpoint::from_text(&wrong).unwrap()).is_err());
        let cut = &text[..text.len() / 2];
        assert!(Checkpoint::from_text(cut).is_err());
        assert!(Checkpoint::from_text("").is_err());
    }

    #[test]
    fn extreme_values_survive() {
        let mut ck = Checkpoint::new("t");
        let vals = [f64::MIN_POSITIVE, -0.0, 1.0 / 3.0, f64::MAX, 5e-324];
        ck.push_scalar("x", &vals);
        let back = Checkpoint::from_text(&ck.to_text()).unwrap();
        let got = back.scalar("x").unwrap();
        for (a, b) in vals.iter().zip(got) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
