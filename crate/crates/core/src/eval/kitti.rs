//! KITTI tracking labels.
//!
//! `frame track_id type truncated occluded alpha left top right bottom h w l x y z rotation_y [score]`
//!
//! `DontCare` rows are skipped. Locations are kept as given, i.e. the bottom
//! centre of the box in camera coordinates.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Box3D;

use super::mot::{DetectionRecord, GroundTruthRecord, PixelBox};

#[derive(Debug, Clone, PartialEq)]
pub struct KittiRecord {
    /// Zero-based, as in the label files.
    pub frame: u32,
    pub track_id: i64,
    pub class_label: String,
    pub truncated: f64,
    /// 0 fully visible, 1 partly, 2 largely occluded, 3 unknown.
    pub occluded: u8,
    pub alpha: f64,
    pub bbox: PixelBox,
    pub box3d: Box3D,
    pub score: Option<f64>,
}

impl KittiRecord {
    /// Ground truth with one-based frames.
    pub fn to_ground_truth(&self) -> GroundTruthRecord {
        GroundTruthRecord {
            frame: self.frame + 1,
            track_id: self.track_id,
            bbox: self.bbox,
            class_label: self.class_label.to_lowercase(),
            visibility: match self.occluded {
                0 => 1.0,
                1 => 0.6,
                2 => 0.3,
                _ => 0.0,
            },
            consider: true,
        }
    }

    pub fn to_detection(&self) -> DetectionRecord {
        DetectionRecord {
            frame: self.frame + 1,
            bbox: self.bbox,
            confidence: self.score.unwrap_or(1.0),
            class_label: self.class_label.to_lowercase(),
        }
    }
}

pub fn parse_kitti_str(text: &str, path: &Path) -> Result<Vec<KittiRecord>> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let ln = n + 1;
        let f: Vec<&str> = raw.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        if f.len() != 17 && f.len() != 18 {
            return Err(err(ln, format!("expected 17 or 18 fields, found {}", f.len())));
        }
        if f[2] == "DontCare" {
            continue;
        }
        let num = |k: usize| -> Result<f64> {
            match f[k].parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(err(ln, format!("field {} is not a number: `{}`", k + 1, f[k]))),
            }
        };
        let frame = f[0].parse::<u32>().map_err(|_| err(ln, format!("bad frame `{}`", f[0])))?;
        let track_id = f[1].parse::<i64>().map_err(|_| err(ln, format!("bad track id `{}`", f[1])))?;
        let occluded = f[4].parse::<u8>().map_err(|_| err(ln, format!("bad occlusion level `{}`", f[4])))?;
        let (l, t, r, b) = (num(6)?, num(7)?, num(8)?, num(9)?);
        if r <= l || b <= t {
            return Err(err(ln, "degenerate 2D box".into()));
        }
        let box3d = Box3D::new([num(13)?, num(14)?, num(15)?], [num(10)?, num(11)?, num(12)?], num(16)?)
            .map_err(|e| err(ln, e.to_string()))?;
        out.push(KittiRecord {
            frame,
            track_id,
            class_label: f[2].to_string(),
            truncated: num(3)?,
            occluded,
            alpha: num(5)?,
            bbox: [l, t, r - l, b - t],
            box3d,
            score: if f.len() == 18 { Some(num(17)?) } else { None },
        });
    }
    out.sort_by_key(|r| r.frame);
    Ok(out)
}

pub fn parse_kitti(path: &Path) -> Result<Vec<KittiRecord>> {
    parse_kitti_str(&crate::error::read_text(path)?, path)
}
