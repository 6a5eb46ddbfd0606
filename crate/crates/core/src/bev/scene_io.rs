//! Scene files: one object per line,
//! `frame id class Cx Cy Cz h w l yaw`, whitespace separated.
//!
//! Columns follow the KITTI tracking label order with the 2D box, truncation,
//! occlusion and alpha fields dropped. Blank lines and `#` comments are
//! ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Box3D;

use super::loss::{Scene3D, SceneObject};

#[derive(Debug, Clone, PartialEq)]
pub struct SceneRecord {
    pub frame: u32,
    pub id: i64,
    pub class: String,
    pub bbox: Box3D,
}

pub fn parse_scene_str(text: &str, path: &Path) -> Result<Vec<SceneRecord>> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 10 {
            return Err(err(n + 1, format!("expected 10 fields, found {}", f.len())));
        }
        let frame = f[0].parse().map_err(|_| err(n + 1, format!("bad frame `{}`", f[0])))?;
        let id = f[1].parse().map_err(|_| err(n + 1, format!("bad id `{}`", f[1])))?;
        let mut v = [0.0; 7];
        for (k, s) in f[3..].iter().enumerate() {
            v[k] = s.parse().map_err(|_| err(n + 1, format!("bad number `{s}`")))?;
        }
        let bbox = Box3D::new([v[0], v[1], v[2]], [v[3], v[4], v[5]], v[6]).map_err(|e| err(n + 1, e.to_string()))?;
        out.push(SceneRecord {
            frame,
            id,
            class: f[2].to_string(),
            bbox,
        });
    }
    out.sort_by_key(|r| (r.frame, r.id));
    Ok(out)
}

pub fn parse_scene(path: &Path) -> Result<Vec<SceneRecord>> {
    parse_scene_str(&crate::error::read_text(path)?, path)
}

pub fn format_scene(records: &[SceneRecord]) -> String {
    let mut s = String::new();
    for r in records {
        let p = r.bbox.params();
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {} {} {} {}",
            r.frame, r.id, r.class, p[0], p[1], p[2], p[3], p[4], p[5], p[6]
        );
    }
    s
}

pub fn write_scene(path: &Path, records: &[SceneRecord]) -> Result<()> {
    fs::write(path, format_scene(records))?;
    Ok(())
}

/// Pair predictions with ground truth by `(frame, id)`, one scene per frame.
/// Predictions without ground truth are an error.
pub fn pair_scenes(pred: &[SceneRecord], gt: &[SceneRecord]) -> Result<BTreeMap<u32, Scene3D>> {
    let truth: BTreeMap<(u32, i64), &SceneRecord> = gt.iter().map(|r| ((r.frame, r.id), r)).collect();
    let mut scenes: BTreeMap<u32, Scene3D> = BTreeMap::new();
    for p in pred {
        let g = truth.get(&(p.frame, p.id)).ok_or_else(|| {
            Error::InvalidInput(format!("prediction frame {} id {} has no ground truth", p.frame, p.id))
        })?;
        scenes.entry(p.frame).or_default().objects.push(SceneObject {
            class: p.class.clone(),
            pred: p.bbox,
            gt: g.bbox,
        });
    }
    Ok(scenes)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# frame id class Cx Cy Cz h w l yaw\n\
        0 1 Car 1.5 1.7 20.0 1.5 1.6 3.9 0.25\n\
        0 2 Pedestrian -3.0 1.7 12.5 1.8 0.6 0.8 -1.2\n\n\
        1 1 Car 1.7 1.7 19.5 1.5 1.6 3.9 0.25\n";

    #[test]
    fn parse_and_round_trip() {
        let p = Path::new("scene.txt");
        let recs = parse_scene_str(SAMPLE, p).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[1].class, "Pedestrian");
        assert_eq!(recs[1].bbox.yaw, -1.2);
        let again = parse_scene_str(&format_scene(&recs), p).unwrap();
        assert_eq!(recs, again);
    }

    #[test]
    fn malformed_line_reports_number() {
        let err = parse_scene_str("0 1 Car 1 2 3\n", Path::new("s")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn pairing_by_frame_and_id() {
        let p = Path::new("s");
        let recs = parse_scene_str(SAMPLE, p).unwrap();
        let scenes = pair_scenes(&recs, &recs).unwrap();
        assert_eq!(scenes[&0].len(), 2);
        assert_eq!(scenes[&1].len(), 1);
        assert!(pair_scenes(&recs, &recs[..1]).is_err());
    }
}
