use crate::appearance::{pair_cost, AppearanceParams, Template};
use crate::error::{invalid, Error, Result};
use crate::geometry::{iou_distance, BBox2D};

/// Dense `detections x tracks` cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("cost matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    #[cfg(test)]
    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        Self { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssociationConfig {
    /// Pairs with IoU distance at or above this are gated. Values above 1
    /// leave the gate always open.
    pub gate_threshold: f64,
    /// Cost assigned to gated pairs; must exceed every appearance cost.
    pub gate_cost: f64,
    /// Consecutive matches needed to confirm a track.
    pub n_init: u32,
    /// Frames a confirmed track may go unmatched before deletion.
    pub max_age: u32,
    /// Only allow matches between equal class labels.
    pub class_gating: bool,
}

impl Default for AssociationConfig {
    fn default() -> Self {
        Self {
            gate_threshold: 0.7,
            gate_cost: 10.0,
            n_init: 3,
            max_age: 30,
            class_gating: true,
        }
    }
}

impl AssociationConfig {
    pub fn validate(&self, appearance: &AppearanceParams) -> Result<()> {
        if !(self.gate_threshold > 0.0) {
            return Err(invalid("gate threshold must be positive"));
        }
        if !(self.gate_cost > appearance.scale) || !self.gate_cost.is_finite() {
            return Err(invalid(format!(
                "gate cost {} must exceed the appearance scale {}",
                self.gate_cost, appearance.scale
            )));
        }
        if self.n_init < 1 || self.max_age < 1 {
            return Err(invalid("n_init and max_age must be at least 1"));
        }
        Ok(())
    }
}

/// One side of a candidate pairing: box, class and template.
#[derive(Debug, Clone, Copy)]
pub struct Candidate<'a> {
    pub bbox: BBox2D,
    pub class: &'a str,
    pub template: &'a Template,
}

/// Gated cost: the appearance cost where the IoU-distance gate is open,
/// `gate_cost` elsewhere. Rows are detections, columns tracks (with their
/// predicted boxes).
pub fn build_cost_matrix(
    detections: &[Candidate<'_>],
    tracks: &[Candidate<'_>],
    cfg: &AssociationConfig,
    appearance: &AppearanceParams,
) -> Result<CostMatrix> {
    let mut m = CostMatrix::filled(detections.len(), tracks.len(), cfg.gate_cost);
    for (i, d) in detections.iter().enumerate() {
        for (j, t) in tracks.iter().enumerate() {
            if cfg.class_gating && d.class != t.class {
                continue;
            }
            if iou_distance(&d.bbox, &t.bbox) >= cfg.gate_threshold {
                continue;
            }
            m.set(i, j, pair_cost(t.template, d.template, appearance)?.min(cfg.gate_cost));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tpl(v: f64) -> Template {
        Template::new(1, 1, 2, vec![v, 1.0 - v]).unwrap()
    }

    #[test]
    fn gate_closed_and_open() {
        let cfg = AssociationConfig::default();
        let app = AppearanceParams::default();
        let t = tpl(0.3);
        let a = BBox2D::new(0.2, 0.2, 0.1, 0.1).unwrap();
        let far = BBox2D::new(0.8, 0.8, 0.1, 0.1).unwrap();
        let det = [Candidate {
            bbox: a,
            class: "car",
            template: &t,
        }];
        let tracks = [
            Candidate {
                bbox: a,
                class: "car",
                template: &t,
            },
            Candidate {
                bbox: far,
                class: "car",
                template: &t,
            },
            Candidate {
                bbox: a,
                class: "pedestrian",
                template: &t,
            },
        ];
        let m = build_cost_matrix(&det, &tracks, &cfg, &app).unwrap();
        assert!((m.get(0, 0) - 0.1).abs() < 1e-12);
        assert_eq!(m.get(0, 1), cfg.gate_cost);
        assert_eq!(m.get(0, 2), cfg.gate_cost);
        let open = AssociationConfig {
            class_gating: false,
            gate_threshold: 1.5,
            ..cfg
        };
        let m = build_cost_matrix(&det, &tracks, &open, &app).unwrap();
        assert!(m.data().iter().all(|&v| v < cfg.gate_cost));
    }

    #[test]
    fn empty_inputs() {
        let m = build_cost_matrix(&[], &[], &AssociationConfig::default(), &AppearanceParams::default()).unwrap();
        assert_eq!((m.rows(), m.cols()), (0, 0));
    }

    #[test]
    fn config_validation() {
        let app = AppearanceParams::default();
        assert!(AssociationConfig::default().validate(&app).is_ok());
        let bad = AssociationConfig {
            gate_cost: 0.5,
            ..Default::default()
        };
        assert!(bad.validate(&app).is_err());
    }
}
