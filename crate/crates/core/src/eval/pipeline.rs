//! Run a tracker over a whole sequence of detection records.

use std::collections::{BTreeMap, HashSet};

use crate::association::{Detection, DetectionAppearance, Tracker, TrackStatus};
use crate::error::Result;
use crate::geometry::BBox2D;

use super::dataset::CropSource;
use super::mot::{DetectionRecord, PixelBox, TrackRecord};

/// Per-frame output of [`run_sequence`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SequenceOutput {
    /// Records of every track that was confirmed at some point.
    pub tracks: Vec<TrackRecord>,
    /// Detection boxes per frame, for rendering.
    pub detections: BTreeMap<u32, Vec<PixelBox>>,
}

impl SequenceOutput {
    pub fn frame_tracks(&self, frame: u32) -> Vec<(i64, PixelBox)> {
        self.tracks
            .iter()
            .filter(|t| t.frame == frame)
            .map(|t| (t.id, t.bbox))
            .collect()
    }
}

/// Group records by frame; frames without detections map to empty lists.
pub fn frames_of(records: &[DetectionRecord], frames: u32) -> BTreeMap<u32, Vec<&DetectionRecord>> {
    let last = records.iter().map(|r| r.frame).max().unwrap_or(0).max(frames);
    let mut by_frame: BTreeMap<u32, Vec<&DetectionRecord>> = (1..=last).map(|f| (f, Vec::new())).collect();
    for r in records {
        by_frame.entry(r.frame).or_default().push(r);
    }
    by_frame
}

/// Tracker inputs for one frame.
pub fn to_detections(
    records: &[&DetectionRecord],
    crops: &CropSource,
    image_width: f64,
    image_height: f64,
) -> Result<Vec<Detection>> {
    let Some(frame) = records.first().map(|r| r.frame) else {
        return Ok(Vec::new());
    };
    let boxes: Vec<PixelBox> = records.iter().map(|r| r.bbox).collect();
    let images = crops.crops(frame, &boxes)?;
    records
        .iter()
        .zip(images)
        .map(|(r, crop)| {
            Ok(Detection {
                bbox: BBox2D::from_ltwh(r.bbox[0], r.bbox[1], r.bbox[2], r.bbox[3], image_width, image_height)?,
                class: r.class_label.clone(),
                confidence: r.confidence,
                appearance: DetectionAppearance::Crop(crop),
            })
        })
        .collect()
}

/// Track `frames` frames. Records of tracks that were never confirmed (only
/// reported while warming up) are dropped from the result.
pub fn run_sequence(
    tracker: &mut Tracker,
    records: &[DetectionRecord],
    frames: u32,
    crops: &CropSource,
    image_width: f64,
    image_height: f64,
) -> Result<SequenceOutput> {
    let mut out = SequenceOutput::default();
    let mut confirmed = HashSet::new();
    for (frame, recs) in frames_of(records, frames) {
        let dets = to_detections(&recs, crops, image_width, image_height)?;
        for t in tracker.step(&dets)? {
            out.tracks.push(TrackRecord {
                frame,
                id: t.id as i64,
                bbox: t.bbox.to_ltwh(image_width, image_height),
                confidence: 1.0,
                class_label: t.class,
            });
        }
        confirmed.extend(
            tracker
                .tracks()
                .iter()
                .filter(|t| t.status() == TrackStatus::Confirmed)
                .map(|t| t.id() as i64),
        );
        out.detections.insert(frame, recs.iter().map(|r| r.bbox).collect());
    }
    out.tracks.retain(|t| confirmed.contains(&t.id));
    Ok(out)
}
