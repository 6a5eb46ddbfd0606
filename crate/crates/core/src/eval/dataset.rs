//! On-disk simulated datasets.
//!
//! A dataset directory holds `manifest.toml`, `scenario.toml`, `det.txt`,
//! `gt.txt` and optionally `img/000001.png`... When no images are written,
//! crops are re-rendered from the scenario on demand.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::appearance::{Frame, ImageCrop};
use crate::error::{Error, Result};

use super::mot::{parse_mot, write_detections, write_ground_truth, DetectionRecord, GroundTruthRecord, PixelBox};
use super::sim::{simulate, SceneRenderer, SimScenario};

pub const MANIFEST: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub seed: u64,
    pub frames: u32,
    pub image_width: u32,
    pub image_height: u32,
    pub scenario: String,
    pub detections: String,
    pub ground_truth: String,
    #[serde(default)]
    pub images: Option<String>,
    /// SHA-256 over scenario, detection and ground-truth files.
    pub digest: String,
}

/// Where detection crops come from.
#[derive(Debug, Clone)]
pub enum CropSource {
    Images(PathBuf),
    Procedural(Box<SceneRenderer>),
}

impl CropSource {
    pub fn crop(&self, frame: u32, bbox: &PixelBox) -> Result<ImageCrop> {
        match self {
            CropSource::Procedural(r) => r.crop(frame, bbox),
            CropSource::Images(dir) => Frame::load(&frame_path(dir, frame))?.crop(bbox[0], bbox[1], bbox[2], bbox[3]),
        }
    }

    /// Crops for all detections of one frame, loading an image at most once.
    pub fn crops(&self, frame: u32, boxes: &[PixelBox]) -> Result<Vec<ImageCrop>> {
        match self {
            CropSource::Procedural(r) => boxes.iter().map(|b| r.crop(frame, b)).collect(),
            CropSource::Images(dir) => {
                if boxes.is_empty() {
                    return Ok(Vec::new());
                }
                let img = Frame::load(&frame_path(dir, frame))?;
                boxes.iter().map(|b| img.crop(b[0], b[1], b[2], b[3])).collect()
            }
        }
    }
}

pub fn frame_path(dir: &Path, frame: u32) -> PathBuf {
    dir.join(format!("{frame:06}.png"))
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    pub manifest: Manifest,
    pub scenario: SimScenario,
    pub detections: Vec<DetectionRecord>,
    pub ground_truth: Vec<GroundTruthRecord>,
}

impl Dataset {
    pub fn crop_source(&self) -> Result<CropSource> {
        Ok(match &self.manifest.images {
            Some(d) => CropSource::Images(self.root.join(d)),
            None => CropSource::Procedural(Box::new(SceneRenderer::new(&self.scenario)?)),
        })
    }
}

fn digest_files(dir: &Path, names: &[&str]) -> Result<String> {
    let mut h = Sha256::new();
    for n in names {
        let path = dir.join(n);
        let bytes = fs::read(&path).map_err(|source| Error::File { path, source })?;
        h.update((n.len() as u64).to_le_bytes());
        h.update(n.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

/// Simulate `scenario` and write it to `dir`, creating the directory.
pub fn write_dataset(dir: &Path, scenario: &SimScenario, seed: u64, images: bool) -> Result<Manifest> {
    let out = simulate(scenario, seed)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("scenario.toml"), scenario.to_toml())?;
    write_detections(&dir.join("det.txt"), &out.detection_records())?;
    write_ground_truth(&dir.join("gt.txt"), &out.ground_truth)?;
    let image_dir = if images {
        let d = dir.join("img");
        fs::create_dir_all(&d)?;
        for f in 1..=scenario.frames {
            out.renderer.render_frame(f)?.save(&frame_path(&d, f))?;
        }
        Some("img".to_string())
    } else {
        None
    };
    let manifest = Manifest {
        seed,
        frames: scenario.frames,
        image_width: scenario.image_width,
        image_height: scenario.image_height,
        scenario: "scenario.toml".into(),
        detections: "det.txt".into(),
        ground_truth: "gt.txt".into(),
        images: image_dir,
        digest: digest_files(dir, &["scenario.toml", "det.txt", "gt.txt"])?,
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(dir.join(MANIFEST), text)?;
    Ok(manifest)
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let path = dir.join(MANIFEST);
    let manifest: Manifest = toml::from_str(&crate::error::read_text(&path)?)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let scenario = SimScenario::load(&dir.join(&manifest.scenario))?;
    let detections = parse_mot(&dir.join(&manifest.detections))?.detections;
    let ground_truth = parse_mot(&dir.join(&manifest.ground_truth))?.ground_truth;
    Ok(Dataset {
        root: dir.to_path_buf(),
        manifest,
        scenario,
        detections,
        ground_truth,
    })
}

/// Recompute the digest of a written dataset.
pub fn dataset_digest(dir: &Path) -> Result<String> {
    let m = load_dataset(dir)?.manifest;
    digest_files(dir, &[&m.scenario, &m.detections, &m.ground_truth])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::sim::occlusion_scenario;

    #[test]
    fn write_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = occlusion_scenario(2, 60, 20).unwrap();
        let m = write_dataset(dir.path(), &s, 7, false).unwrap();
        let d = load_dataset(dir.path()).unwrap();
        let sim = simulate(&s, 7).unwrap();
        assert_eq!(d.detections, sim.detection_records());
        assert_eq!(d.ground_truth, sim.ground_truth);
        assert_eq!(dataset_digest(dir.path()).unwrap(), m.digest);
        let other = tempfile::tempdir().unwrap();
        assert_eq!(write_dataset(other.path(), &s, 7, false).unwrap().digest, m.digest);
        let third = tempfile::tempdir().unwrap();
        assert_ne!(write_dataset(third.path(), &s, 8, false).unwrap().digest, m.digest);
    }

    #[test]
    fn image_crops_match_procedural_crops_roughly() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = super::super::sim::clean_scenario(1, 3);
        s.image_width = 200;
        s.image_height = 160;
        s.objects[0].start = [100.0, 80.0];
        s.objects[0].size = [40.0, 60.0];
        write_dataset(dir.path(), &s, 0, true).unwrap();
        let d = load_dataset(dir.path()).unwrap();
        let det = &d.detections[0];
        let a = d.crop_source().unwrap().crop(det.frame, &det.bbox).unwrap();
        let b = CropSource::Procedural(Box::new(SceneRenderer::new(&s).unwrap())).crop(det.frame, &det.bbox).unwrap();
        let diff: f32 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).sum::<f32>() / a.data().len() as f32;
        assert!(diff < 0.1, "mean abs diff {diff}");
    }
}
