//! MOT16-style CSV files.
//!
//! * detections: `frame,-1,left,top,width,height,conf,x,y,z`
//! * tracking output: `frame,id,left,top,width,height,conf,x,y,z`
//! * ground truth: `frame,id,left,top,width,height,consider,class,visibility`
//!
//! The world-coordinate columns `x,y,z` are `-1` for pedestrians, as in the
//! public files. For any other class, `x` carries the numeric class id from
//! the ground-truth class table so that multi-class data survives a round
//! trip; `y` and `z` stay `-1`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::BBox2D;

/// Pixel-space `(left, top, width, height)`.
pub type PixelBox = [f64; 4];

/// Numeric class ids of the ground-truth class column.
pub const MOT_CLASSES: [(i32, &str); 12] = [
    (1, "pedestrian"),
    (2, "person_on_vehicle"),
    (3, "car"),
    (4, "bicycle"),
    (5, "motorbike"),
    (6, "non_motorized_vehicle"),
    (7, "static_person"),
    (8, "distractor"),
    (9, "occluder"),
    (10, "occluder_on_ground"),
    (11, "occluder_full"),
    (12, "reflection"),
];

pub fn class_name(id: i32) -> Option<&'static str> {
    MOT_CLASSES.iter().find(|(i, _)| *i == id).map(|(_, n)| *n)
}

pub fn class_id(name: &str) -> Option<i32> {
    MOT_CLASSES.iter().find(|(_, n)| *n == name).map(|(i, _)| *i)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRecord {
    pub frame: u32,
    pub bbox: PixelBox,
    pub confidence: f64,
    pub class_label: String,
}

/// One identity-bearing box of a tracker's output.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackRecord {
    pub frame: u32,
    pub id: i64,
    pub bbox: PixelBox,
    pub confidence: f64,
    pub class_label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthRecord {
    pub frame: u32,
    pub track_id: i64,
    pub bbox: PixelBox,
    pub class_label: String,
    pub visibility: f64,
    /// The ground-truth "consider" flag; ignored entries are not scored.
    pub consider: bool,
}

/// Contents of a MOT file, split by row kind.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MotData {
    pub detections: Vec<DetectionRecord>,
    pub tracks: Vec<TrackRecord>,
    pub ground_truth: Vec<GroundTruthRecord>,
}

pub fn to_bbox(b: &PixelBox, image_width: f64, image_height: f64) -> Result<BBox2D> {
    BBox2D::from_ltwh(b[0], b[1], b[2], b[3], image_width, image_height)
}

pub fn from_bbox(b: &BBox2D, image_width: f64, image_height: f64) -> PixelBox {
    b.to_ltwh(image_width, image_height)
}

/// Pixel-space IoU.
pub fn pixel_iou(a: &PixelBox, b: &PixelBox) -> f64 {
    let iw = (a[0] + a[2]).min(b[0] + b[2]) - a[0].max(b[0]);
    let ih = (a[1] + a[3]).min(b[1] + b[3]) - a[1].max(b[1]);
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    let (sa, sb) = (a[2] * a[3], b[2] * b[3]);
    (inter / (sa + sb - inter).max(sa.max(sb))).min(1.0)
}

fn world_class(x: f64) -> std::result::Result<String, String> {
    if x == -1.0 {
        return Ok("pedestrian".into());
    }
    if x.fract() == 0.0 {
        if let Some(n) = class_name(x as i32) {
            return Ok(n.into());
        }
    }
    Err(format!("unknown class id {x}"))
}

fn world_column(class: &str) -> Result<String> {
    if class == "pedestrian" {
        return Ok("-1".into());
    }
    class_id(class)
        .map(|i| i.to_string())
        .ok_or_else(|| Error::InvalidInput(format!("class `{class}` has no MOT id")))
}

pub fn parse_mot_str(text: &str, path: &Path) -> Result<MotData> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut data = MotData::default();
    for (n, raw) in text.lines().enumerate() {
        let ln = n + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let num = |k: usize| -> Result<f64> {
            let s = fields[k];
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(err(ln, format!("field {} is not a number: `{s}`", k + 1))),
            }
        };
        if fields.len() != 9 && fields.len() != 10 {
            return Err(err(ln, format!("expected 9 or 10 fields, found {}", fields.len())));
        }
        let frame = num(0)?;
        if frame < 1.0 || frame.fract() != 0.0 || frame > u32::MAX as f64 {
            return Err(err(ln, format!("frame must be a positive integer, got {frame}")));
        }
        let frame = frame as u32;
        let id = num(1)?;
        if id.fract() != 0.0 {
            return Err(err(ln, format!("id must be an integer, got {id}")));
        }
        let bbox = [num(2)?, num(3)?, num(4)?, num(5)?];
        if bbox[2] <= 0.0 || bbox[3] <= 0.0 {
            return Err(err(ln, "width and height must be positive".into()));
        }
        if fields.len() == 9 {
            let class = num(7)?;
            let class_label = class_name(class as i32)
                .filter(|_| class.fract() == 0.0)
                .ok_or_else(|| err(ln, format!("unknown class id {class}")))?
                .to_string();
            let visibility = num(8)?;
            if !(0.0..=1.0).contains(&visibility) {
                return Err(err(ln, format!("visibility {visibility} outside [0, 1]")));
            }
            data.ground_truth.push(GroundTruthRecord {
                frame,
                track_id: id as i64,
                bbox,
                class_label,
                visibility,
                consider: num(6)? != 0.0,
            });
        } else {
            let confidence = num(6)?;
            let class_label = world_class(num(7)?).map_err(|m| err(ln, m))?;
            if id == -1.0 {
                data.detections.push(DetectionRecord {
                    frame,
                    bbox,
                    confidence,
                    class_label,
                });
            } else {
                data.tracks.push(TrackRecord {
                    frame,
                    id: id as i64,
                    bbox,
                    confidence,
                    class_label,
                });
            }
        }
    }
    // Stable sorts keep the in-frame order of the file.
    data.detections.sort_by_key(|r| r.frame);
    data.tracks.sort_by_key(|r| r.frame);
    data.ground_truth.sort_by_key(|r| r.frame);
    Ok(data)
}

pub fn parse_mot(path: &Path) -> Result<MotData> {
    parse_mot_str(&crate::error::read_text(path)?, path)
}

pub fn format_detections(records: &[DetectionRecord]) -> Result<String> {
    let mut s = String::new();
    for r in records {
        let b = r.bbox;
        let _ = writeln!(
            s,
            "{},-1,{},{},{},{},{},{},-1,-1",
            r.frame,
            b[0],
            b[1],
            b[2],
            b[3],
            r.confidence,
            world_column(&r.class_label)?
        );
    }
    Ok(s)
}

pub fn format_tracks(records: &[TrackRecord]) -> Result<String> {
    let mut s = String::new();
    for r in records {
        if r.id < 0 {
            return Err(Error::InvalidInput(format!("track id {} is negative", r.id)));
        }
        let b = r.bbox;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},-1,-1",
            r.frame,
            r.id,
            b[0],
            b[1],
            b[2],
            b[3],
            r.confidence,
            world_column(&r.class_label)?
        );
    }
    Ok(s)
}

pub fn format_ground_truth(records: &[GroundTruthRecord]) -> Result<String> {
    let mut s = String::new();
    for r in records {
        let class = class_id(&r.class_label)
            .ok_or_else(|| Error::InvalidInput(format!("class `{}` has no MOT id", r.class_label)))?;
        let b = r.bbox;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.frame,
            r.track_id,
            b[0],
            b[1],
            b[2],
            b[3],
            u8::from(r.consider),
            class,
            r.visibility
        );
    }
    Ok(s)
}

pub fn write_detections(path: &Path, records: &[DetectionRecord]) -> Result<()> {
    fs::write(path, format_detections(records)?)?;
    Ok(())
}

pub fn write_tracks(path: &Path, records: &[TrackRecord]) -> Result<()> {
    fs::write(path, format_tracks(records)?)?;
    Ok(())
}

pub fn write_ground_truth(path: &Path, records: &[GroundTruthRecord]) -> Result<()> {
    fs::write(path, format_ground_truth(records)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("test.txt")
    }

    #[test]
    fn detection_line() {
        let d = parse_mot_str("1,-1,10,20,30,40,0.9,-1,-1,-1\n", p()).unwrap();
        assert_eq!(
            d.detections,
            vec![DetectionRecord {
                frame: 1,
                bbox: [10.0, 20.0, 30.0, 40.0],
                confidence: 0.9,
                class_label: "pedestrian".into(),
            }]
        );
        assert!(parse_mot_str("", p()).unwrap() == MotData::default());
    }

    #[test]
    fn frames_are_resorted_stably() {
        let text = "3,-1,1,1,2,2,0.5,-1,-1,-1\n1,-1,5,5,2,2,0.4,-1,-1,-1\n1,-1,9,9,2,2,0.3,-1,-1,-1\n";
        let d = parse_mot_str(text, p()).unwrap();
        let order: Vec<(u32, f64)> = d.detections.iter().map(|r| (r.frame, r.bbox[0])).collect();
        assert_eq!(order, vec![(1, 5.0), (1, 9.0), (3, 1.0)]);
    }

    #[test]
    fn malformed_line_reports_number() {
        let e = parse_mot_str("1,-1,1,1,2,2,0.5,-1,-1,-1\n1,x,1,1,1,1,1,1,1,1\n", p()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        assert!(parse_mot_str("1,2,3\n", p()).is_err());
        assert!(parse_mot_str("0,-1,1,1,2,2,0.5,-1,-1,-1\n", p()).is_err());
    }

    #[test]
    fn round_trips_are_exact() {
        let tracks = vec![
            TrackRecord {
                frame: 2,
                id: 7,
                bbox: [1.0 / 3.0, 20.125, 30.0, 40.5],
                confidence: 1.0,
                class_label: "car".into(),
            },
            TrackRecord {
                frame: 3,
                id: 1,
                bbox: [0.1, 0.2, 1e-3, 123456.789],
                confidence: 0.25,
                class_label: "pedestrian".into(),
            },
        ];
        let back = parse_mot_str(&format_tracks(&tracks).unwrap(), p()).unwrap();
        assert_eq!(back.tracks, tracks);
        let gt = vec![GroundTruthRecord {
            frame: 1,
            track_id: 3,
            bbox: [5.5, 6.0, 7.0, 8.25],
            class_label: "bicycle".into(),
            visibility: 0.3333333333333333,
            consider: true,
        }];
        assert_eq!(parse_mot_str(&format_ground_truth(&gt).unwrap(), p()).unwrap().ground_truth, gt);
        assert_eq!(format_tracks(&[]).unwrap(), "");
    }

    #[test]
    fn pixel_iou_matches_normalized() {
        let a = [0.0, 0.0, 2.0, 2.0];
        let b = [1.0, 0.0, 2.0, 2.0];
        assert!((pixel_iou(&a, &b) - 1.0 / 3.0).abs() < 1e-12);
        let na = to_bbox(&a, 10.0, 10.0).unwrap();
        let nb = to_bbox(&b, 10.0, 10.0).unwrap();
        assert!((crate::geometry::iou(&na, &nb) - 1.0 / 3.0).abs() < 1e-12);
    }
}
