//! CLEAR-MOT scoring and average precision.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::association::{hungarian_solve, CostMatrix};
use crate::error::{invalid, Result};

use super::mot::{pixel_iou, GroundTruthRecord, TrackRecord};

/// Fraction of a trajectory that must be matched for it to count as mostly
/// tracked, and the fraction at or below which it is mostly lost.
pub const MOSTLY_TRACKED: f64 = 0.8;
pub const MOSTLY_LOST: f64 = 0.2;

const FORBIDDEN: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct ClearMot {
    pub mota: f64,
    /// Mean IoU over matches; 0 when nothing matched.
    pub motp: f64,
    /// Ratios of ground-truth trajectories.
    pub mt: f64,
    pub ml: f64,
    pub mostly_tracked: usize,
    pub partially_tracked: usize,
    pub mostly_lost: usize,
    pub trajectories: usize,
    pub id_switches: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub matches: usize,
    pub gt_count: usize,
    /// Matched fraction of each ground-truth trajectory.
    pub coverage: BTreeMap<i64, f64>,
    /// Hypothesis id matched to each ground-truth id, frame by frame.
    pub assignments: BTreeMap<i64, Vec<(u32, i64)>>,
}

impl ClearMot {
    /// Hypothesis ids a ground-truth trajectory was matched to, in order of
    /// first appearance.
    pub fn hypothesis_ids(&self, gt_id: i64) -> Vec<i64> {
        let mut seen = Vec::new();
        for &(_, h) in self.assignments.get(&gt_id).into_iter().flatten() {
            if !seen.contains(&h) {
                seen.push(h);
            }
        }
        seen
    }
}

/// Score `hyp` against `gt`; ground truth with `consider == false` is dropped.
pub fn score(gt: &[GroundTruthRecord], hyp: &[TrackRecord], iou_threshold: f64) -> Result<ClearMot> {
    if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
        return Err(invalid("IoU threshold must lie in (0, 1]"));
    }
    let gt: Vec<&GroundTruthRecord> = gt.iter().filter(|g| g.consider).collect();
    if gt.is_empty() {
        return Err(invalid("ground truth is empty, MOTA is undefined"));
    }
    let mut frames: BTreeMap<u32, (Vec<&GroundTruthRecord>, Vec<&TrackRecord>)> = BTreeMap::new();
    let mut seen = HashSet::new();
    for g in &gt {
        if !seen.insert((g.frame, g.track_id)) {
            return Err(invalid(format!(
                "ground truth id {} appears twice in frame {}",
                g.track_id, g.frame
            )));
        }
        frames.entry(g.frame).or_default().0.push(g);
    }
    for h in hyp {
        frames.entry(h.frame).or_default().1.push(h);
    }

    let mut last: HashMap<i64, i64> = HashMap::new();
    let mut lengths: BTreeMap<i64, usize> = BTreeMap::new();
    let mut matched_frames: BTreeMap<i64, usize> = BTreeMap::new();
    let mut assignments: BTreeMap<i64, Vec<(u32, i64)>> = BTreeMap::new();
    let (mut fp, mut fn_, mut idsw, mut matches) = (0, 0, 0, 0);
    let mut iou_sum = 0.0;

    for (&frame, (gs, hs)) in &frames {
        for g in gs {
            *lengths.entry(g.track_id).or_default() += 1;
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut g_used = vec![false; gs.len()];
        let mut h_used = vec![false; hs.len()];
        // Keep last known correspondences that are still valid.
        for (gi, g) in gs.iter().enumerate() {
            let Some(&h_id) = last.get(&g.track_id) else { continue };
            if let Some(hi) = hs.iter().position(|h| h.id == h_id) {
                if !h_used[hi] && pixel_iou(&g.bbox, &hs[hi].bbox) >= iou_threshold {
                    pairs.push((gi, hi));
                    g_used[gi] = true;
                    h_used[hi] = true;
                }
            }
        }
        let free_g: Vec<usize> = (0..gs.len()).filter(|&i| !g_used[i]).collect();
        let free_h: Vec<usize> = (0..hs.len()).filter(|&i| !h_used[i]).collect();
        if !free_g.is_empty() && !free_h.is_empty() {
            let mut data = Vec::with_capacity(free_g.len() * free_h.len());
            for &gi in &free_g {
                for &hi in &free_h {
                    let o = pixel_iou(&gs[gi].bbox, &hs[hi].bbox);
                    data.push(if o >= iou_threshold { 1.0 - o } else { FORBIDDEN });
                }
            }
            let m = CostMatrix::from_vec(free_g.len(), free_h.len(), data)?;
            for (r, c) in hungarian_solve(&m, FORBIDDEN)? {
                let (gi, hi) = (free_g[r], free_h[c]);
                if let Some(&prev) = last.get(&gs[gi].track_id) {
                    if prev != hs[hi].id {
                        idsw += 1;
                    }
                }
                pairs.push((gi, hi));
                g_used[gi] = true;
                h_used[hi] = true;
            }
        }
        for &(gi, hi) in &pairs {
            let (g, h) = (gs[gi], hs[hi]);
            last.insert(g.track_id, h.id);
            *matched_frames.entry(g.track_id).or_default() += 1;
            assignments.entry(g.track_id).or_default().push((frame, h.id));
            iou_sum += pixel_iou(&g.bbox, &h.bbox);
        }
        matches += pairs.len();
        fn_ += g_used.iter().filter(|u| !**u).count();
        fp += h_used.iter().filter(|u| !**u).count();
    }

    let gt_count = gt.len();
    let coverage: BTreeMap<i64, f64> = lengths
        .iter()
        .map(|(&id, &n)| (id, *matched_frames.get(&id).unwrap_or(&0) as f64 / n as f64))
        .collect();
    let mostly_tracked = coverage.values().filter(|&&c| c >= MOSTLY_TRACKED).count();
    let mostly_lost = coverage.values().filter(|&&c| c <= MOSTLY_LOST).count();
    let trajectories = coverage.len();
    for v in assignments.values_mut() {
        v.sort_unstable();
    }
    Ok(ClearMot {
        mota: 1.0 - (fp + fn_ + idsw) as f64 / gt_count as f64,
        motp: if matches == 0 { 0.0 } else { iou_sum / matches as f64 },
        mt: mostly_tracked as f64 / trajectories as f64,
        ml: mostly_lost as f64 / trajectories as f64,
        mostly_tracked,
        partially_tracked: trajectories - mostly_tracked - mostly_lost,
        mostly_lost,
        trajectories,
        id_switches: idsw,
        false_positives: fp,
        false_negatives: fn_,
        matches,
        gt_count,
        coverage,
        assignments,
    })
}

/// All-point interpolated average precision of scored predictions.
///
/// Each entry is `(confidence, is_true_positive)`; `positives` is the number
/// of ground-truth objects.
pub fn average_precision(scored: &[(f64, bool)], positives: usize) -> Result<f64> {
    if positives == 0 {
        return Err(invalid("average precision needs at least one positive"));
    }
    if scored.iter().any(|(c, _)| !c.is_finite()) {
        return Err(invalid("confidences must be finite"));
    }
    let mut order: Vec<&(f64, bool)> = scored.iter().collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut tp = 0usize;
    let mut curve = Vec::with_capacity(order.len());
    for (k, (_, hit)) in order.iter().enumerate() {
        tp += usize::from(*hit);
        curve.push((tp as f64 / positives as f64, tp as f64 / (k + 1) as f64));
    }
    // Precision envelope, right to left.
    for k in (0..curve.len().saturating_sub(1)).rev() {
        curve[k].1 = curve[k].1.max(curve[k + 1].1);
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for (r, p) in curve {
        ap += (r - prev_recall) * p;
        prev_recall = r;
    }
    Ok(ap)
}
