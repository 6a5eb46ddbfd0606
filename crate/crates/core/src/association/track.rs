use std::collections::VecDeque;

use crate::appearance::Template;
use crate::error::Result;
use crate::geometry::BBox2D;
use crate::motion::{KalmanConfig, KalmanState, LstmTrackState, MotionModel};

/// Boxes kept per track.
pub const HISTORY_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    Tentative,
    Confirmed,
    Deleted,
}

/// Per-track motion state for either predictor.
#[derive(Debug, Clone)]
pub enum MotionState {
    Kalman(KalmanState),
    Lstm(LstmTrackState),
}

#[derive(Debug, Clone)]
pub struct Track {
    id: u64,
    class_label: String,
    status: TrackStatus,
    hits: u32,
    age: u32,
    time_since_update: u32,
    history: VecDeque<BBox2D>,
    template: Template,
    motion: MotionState,
    predicted: BBox2D,
    /// Box reported for the current frame (the last matched measurement).
    last_observed: BBox2D,
}

impl Track {
    pub(crate) fn new(id: u64, bbox: BBox2D, class_label: &str, template: Template, motion: MotionState, n_init: u32) -> Self {
        let mut history = VecDeque::with_capacity(HISTORY_LEN);
        history.push_back(bbox);
        Self {
            id,
            class_label: class_label.to_string(),
            status: if n_init <= 1 {
                TrackStatus::Confirmed
            } else {
                TrackStatus::Tentative
            },
            hits: 1,
            age: 1,
            time_since_update: 0,
            history,
            template,
            motion,
            predicted: bbox,
            last_observed: bbox,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn class_label(&self) -> &str {
        &self.class_label
    }

    pub fn status(&self) -> TrackStatus {
        self.status
    }

    pub fn hits(&self) -> u32 {
        self.hits
    }

    pub fn age(&self) -> u32 {
        self.age
    }

    pub fn time_since_update(&self) -> u32 {
        self.time_since_update
    }

    pub fn history(&self) -> impl Iterator<Item = &BBox2D> {
        self.history.iter()
    }

    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn predicted(&self) -> BBox2D {
        self.predicted
    }

    pub fn last_observed(&self) -> BBox2D {
        self.last_observed
    }

    pub(crate) fn predict(&mut self, kalman: &KalmanConfig, model: Option<&MotionModel>) -> Result<BBox2D> {
        self.predicted = match (&mut self.motion, model) {
            (MotionState::Kalman(k), _) => k.predict(kalman),
            (MotionState::Lstm(s), Some(m)) => s.predict(m)?,
            (MotionState::Lstm(s), None) => s.box_estimate(),
        };
        self.age += 1;
        Ok(self.predicted)
    }

    /// Motion update first, then the occlusion-weighted template update.
    pub(crate) fn mark_matched(
        &mut self,
        bbox: BBox2D,
        template: Template,
        kalman: &KalmanConfig,
        model: Option<&MotionModel>,
        n_init: u32,
    ) -> Result<()> {
        match (&mut self.motion, model) {
            (MotionState::Kalman(k), _) => {
                k.update(&bbox, kalman)?;
            }
            (MotionState::Lstm(s), Some(m)) => s.update(m, bbox)?,
            (MotionState::Lstm(_), None) => {}
        }
        self.template = template;
        if self.history.len() == HISTORY_LEN {
            self.history.pop_front();
        }
        self.history.push_back(bbox);
        self.last_observed = bbox;
        self.hits += 1;
        self.time_since_update = 0;
        if self.status == TrackStatus::Tentative && self.hits >= n_init {
            self.status = TrackStatus::Confirmed;
        }
        Ok(())
    }

    pub(crate) fn mark_missed(&mut self, model: Option<&MotionModel>, max_age: u32) -> Result<()> {
        if let (MotionState::Lstm(s), Some(m)) = (&mut self.motion, model) {
            s.mark_missed(m)?;
        }
        self.time_since_update += 1;
        if self.status == TrackStatus::Tentative || self.time_since_update > max_age {
            self.status = TrackStatus::Deleted;
        }
        Ok(())
    }
}
