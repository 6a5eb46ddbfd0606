use std::sync::Arc;

use rayon::prelude::*;

use crate::appearance::{update_template, AppearanceParams, HogEncoder, ImageCrop, Template, TemplateEncoder};
use crate::error::{Error, Result};
use crate::geometry::{occlusion_fraction, BBox2D};
use crate::motion::{KalmanConfig, KalmanState, LstmTrackState, MotionModel};

use super::cost::{build_cost_matrix, AssociationConfig, Candidate};
use super::hungarian::hungarian_solve;
use super::track::{MotionState, Track, TrackStatus};

/// Appearance evidence attached to a detection.
#[derive(Debug, Clone)]
pub enum DetectionAppearance {
    /// Raw crop; encoded during the frame's first stage.
    Crop(ImageCrop),
    /// Template computed elsewhere (must match the encoder's shape).
    Template(Template),
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub bbox: BBox2D,
    pub class: String,
    pub confidence: f64,
    pub appearance: DetectionAppearance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackOutput {
    pub id: u64,
    pub bbox: BBox2D,
    pub class: String,
}

#[derive(Clone, Default)]
pub enum Predictor {
    #[default]
    Kalman,
    Lstm(Arc<MotionModel>),
}

impl std::fmt::Debug for Predictor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Predictor::Kalman => f.write_str("Kalman"),
            Predictor::Lstm(m) => write!(f, "Lstm(hidden={})", m.hidden_dim()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerConfig {
    pub association: AssociationConfig,
    pub appearance: AppearanceParams,
    pub kalman: KalmanConfig,
    /// Encode detection crops on the rayon pool.
    pub parallel_templates: bool,
    /// Report tentative tracks matched during the first `n_init` frames of
    /// a sequence, so objects present from the start are not dropped while
    /// their tracks are still confirming.
    pub report_warmup: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            association: AssociationConfig::default(),
            appearance: AppearanceParams::default(),
            kalman: KalmanConfig::default(),
            parallel_templates: true,
            report_warmup: true,
        }
    }
}

/// Online tracker: call [`Tracker::step`] once per frame, in order.
pub struct Tracker {
    config: TrackerConfig,
    encoder: Arc<dyn TemplateEncoder>,
    predictor: Predictor,
    tracks: Vec<Track>,
    next_id: u64,
    frame: u64,
}

impl Tracker {
    pub fn new(config: TrackerConfig, predictor: Predictor) -> Result<Self> {
        Self::with_encoder(config, predictor, Arc::new(HogEncoder::default()))
    }

    pub fn with_encoder(config: TrackerConfig, predictor: Predictor, encoder: Arc<dyn TemplateEncoder>) -> Result<Self> {
        config.appearance.validate()?;
        config.association.validate(&config.appearance)?;
        Ok(Self {
            config,
            encoder,
            predictor,
            tracks: Vec::new(),
            next_id: 1,
            frame: 0,
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn frame(&self) -> u64 {
        self.frame
    }

    pub fn encoder(&self) -> &dyn TemplateEncoder {
        self.encoder.as_ref()
    }

    fn templates(&self, detections: &[Detection]) -> Result<Vec<Template>> {
        let encode = |d: &Detection| match &d.appearance {
            DetectionAppearance::Crop(c) => self.encoder.encode(c),
            DetectionAppearance::Template(t) => Ok(t.clone()),
        };
        if self.config.parallel_templates && detections.len() > 1 {
            detections.par_iter().map(encode).collect()
        } else {
            detections.iter().map(encode).collect()
        }
    }

    /// Process one frame and return the tracks reported for it.
    pub fn step(&mut self, detections: &[Detection]) -> Result<Vec<TrackOutput>> {
        self.frame += 1;
        let assoc = self.config.association;
        let kalman = self.config.kalman;
        let model = match &self.predictor {
            Predictor::Kalman => None,
            Predictor::Lstm(m) => Some(Arc::clone(m)),
        };
        let model_ref = model.as_deref();

        // Predicted boxes for every live track.
        for t in &mut self.tracks {
            t.predict(&kalman, model_ref)?;
        }

        // Stage one: detection templates.
        let templates = self.templates(detections)?;

        // Stage two: gated appearance costs and assignment.
        let det_cands: Vec<Candidate<'_>> = detections
            .iter()
            .zip(&templates)
            .map(|(d, t)| Candidate {
                bbox: d.bbox,
                class: &d.class,
                template: t,
            })
            .collect();
        let track_cands: Vec<Candidate<'_>> = self
            .tracks
            .iter()
            .map(|t| Candidate {
                bbox: t.predicted(),
                class: t.class_label(),
                template: t.template(),
            })
            .collect();
        let costs = build_cost_matrix(&det_cands, &track_cands, &assoc, &self.config.appearance)?;
        drop(det_cands);
        drop(track_cands);
        let matches = hungarian_solve(&costs, assoc.gate_cost)?;

        let mut det_matched = vec![false; detections.len()];
        let mut track_matched = vec![false; self.tracks.len()];
        let boxes: Vec<BBox2D> = detections.iter().map(|d| d.bbox).collect();
        let mut templates: Vec<Option<Template>> = templates.into_iter().map(Some).collect();

        for &(di, ti) in &matches {
            if det_matched[di] || track_matched[ti] {
                return Err(Error::InvalidInput("assignment is not a matching".into()));
            }
            det_matched[di] = true;
            track_matched[ti] = true;
            let others: Vec<BBox2D> = boxes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != di)
                .map(|(_, b)| *b)
                .collect();
            let gamma = occlusion_fraction(&boxes[di], &others);
            let det_template = templates[di].take().expect("each detection matched once");
            let track = &mut self.tracks[ti];
            let mixed = update_template(track.template(), &det_template, gamma)?;
            track.mark_matched(boxes[di], mixed, &kalman, model_ref, assoc.n_init)?;
        }

        for (ti, t) in self.tracks.iter_mut().enumerate() {
            if !track_matched[ti] {
                t.mark_missed(model_ref, assoc.max_age)?;
            }
        }

        for (di, d) in detections.iter().enumerate() {
            if det_matched[di] {
                continue;
            }
            let motion = match model_ref {
                None => MotionState::Kalman(KalmanState::initiate(&d.bbox, &kalman)),
                Some(m) => MotionState::Lstm(LstmTrackState::new(m, d.bbox)),
            };
            let template = templates[di].take().expect("unmatched detection keeps its template");
            self.tracks
                .push(Track::new(self.next_id, d.bbox, &d.class, template, motion, assoc.n_init));
            self.next_id += 1;
        }

        self.tracks.retain(|t| t.status() != TrackStatus::Deleted);

        let warmup = self.config.report_warmup && self.frame <= u64::from(assoc.n_init);
        let mut out: Vec<TrackOutput> = self
            .tracks
            .iter()
            .filter(|t| t.time_since_update() == 0)
            .filter(|t| t.status() == TrackStatus::Confirmed || warmup)
            .map(|t| TrackOutput {
                id: t.id(),
                bbox: t.last_observed(),
                class: t.class_label().to_string(),
            })
            .collect();
        out.sort_by_key(|o| o.id);
        Ok(out)
    }
}
