//! Synthetic sequences with known ground truth.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! frames = 100
//! image_width = 640
//! image_height = 480
//! noise_std = 1.0            # pixels, added to left/top/width/height
//! false_positive_rate = 0.05 # chance of one spurious box per frame
//! miss_rate = 0.0            # chance each visible object is not detected
//! min_visibility = 0.5       # objects less visible than this are not detected
//!
//! [[objects]]                # ids are 1-based, in file order
//! class = "pedestrian"
//! start = [100.0, 240.0]     # box centre in pixels at the first frame
//! size = [40.0, 80.0]        # width, height in pixels
//! depth = 0.0                # larger is nearer the camera
//! first_frame = 1
//! last_frame = 100
//! motion = { kind = "constant_velocity", velocity = [3.0, 0.0] }
//! # { kind = "sinusoidal", velocity = [2, 0], amplitude = [0, 20], period = 40, phase = 0 }
//! # { kind = "crossover", end = [500, 240] } moves linearly from start to end
//!
//! [[occlusions]]
//! object = 1
//! start = 40
//! duration = 20
//! coverage = 1.0             # fraction of the box width hidden by the screen
//! ```
//!
//! An occlusion places a static-in-the-box screen in front of everything,
//! covering the left `coverage` of the target's box for the event's frames.
//! Objects also hide each other by depth.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::appearance::{CropRect, Frame, ImageCrop};
use crate::error::{invalid, Error, Result};
use crate::geometry::{occlusion_fraction, BBox2D};

use super::mot::{DetectionRecord, GroundTruthRecord, PixelBox};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotionProfile {
    ConstantVelocity {
        velocity: [f64; 2],
    },
    Sinusoidal {
        velocity: [f64; 2],
        amplitude: [f64; 2],
        period: f64,
        #[serde(default)]
        phase: f64,
    },
    Crossover {
        end: [f64; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimObject {
    #[serde(default = "default_class")]
    pub class: String,
    pub start: [f64; 2],
    pub size: [f64; 2],
    #[serde(default)]
    pub depth: f64,
    #[serde(default = "one")]
    pub first_frame: u32,
    #[serde(default)]
    pub last_frame: Option<u32>,
    pub motion: MotionProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OcclusionEvent {
    pub object: u32,
    pub start: u32,
    pub duration: u32,
    #[serde(default = "unit")]
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimScenario {
    pub frames: u32,
    pub image_width: u32,
    pub image_height: u32,
    #[serde(default)]
    pub noise_std: f64,
    #[serde(default)]
    pub false_positive_rate: f64,
    #[serde(default)]
    pub miss_rate: f64,
    #[serde(default = "half")]
    pub min_visibility: f64,
    #[serde(default)]
    pub objects: Vec<SimObject>,
    #[serde(default)]
    pub occlusions: Vec<OcclusionEvent>,
}

fn default_class() -> String {
    "pedestrian".into()
}
fn one() -> u32 {
    1
}
fn unit() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}

impl SimScenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&crate::error::read_text(path)?).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 || self.image_width == 0 || self.image_height == 0 {
            return Err(invalid("frames and image size must be positive"));
        }
        for (name, r) in [
            ("false_positive_rate", self.false_positive_rate),
            ("miss_rate", self.miss_rate),
            ("min_visibility", self.min_visibility),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(invalid(format!("{name} must lie in [0, 1], got {r}")));
            }
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(invalid("noise_std must be finite and non-negative"));
        }
        for (k, o) in self.objects.iter().enumerate() {
            let last = o.last_frame.unwrap_or(self.frames);
            if o.first_frame < 1 || o.first_frame > last || last > self.frames {
                return Err(invalid(format!("object {} has an invalid lifetime", k + 1)));
            }
            if !(o.size[0] > 0.0 && o.size[1] > 0.0) || !o.size.iter().chain(&o.start).all(|v| v.is_finite()) {
                return Err(invalid(format!("object {} needs a finite positive size", k + 1)));
            }
            if o.class.is_empty() || o.class.contains(char::is_whitespace) {
                return Err(invalid(format!("object {} needs a single-word class", k + 1)));
            }
            if let MotionProfile::Sinusoidal { period, .. } = o.motion {
                if !(period > 0.0) {
                    return Err(invalid(format!("object {} needs a positive period", k + 1)));
                }
            }
        }
        for e in &self.occlusions {
            if e.object == 0 || e.object as usize > self.objects.len() {
                return Err(invalid(format!("occlusion names unknown object {}", e.object)));
            }
            if e.duration > self.frames || e.start < 1 || e.start + e.duration > self.frames + 1 {
                return Err(invalid("occlusion does not fit in the sequence"));
            }
            if !(e.coverage > 0.0 && e.coverage <= 1.0) {
                return Err(invalid("occlusion coverage must lie in (0, 1]"));
            }
        }
        Ok(())
    }

    fn last_frame(&self, o: &SimObject) -> u32 {
        o.last_frame.unwrap_or(self.frames)
    }

    /// Noise-free pixel box of object `k` (0-based) at `frame`, if alive and
    /// centred inside the image.
    pub fn object_box(&self, k: usize, frame: u32) -> Option<PixelBox> {
        let o = &self.objects[k];
        let last = self.last_frame(o);
        if frame < o.first_frame || frame > last {
            return None;
        }
        let t = (frame - o.first_frame) as f64;
        let [x0, y0] = o.start;
        let (cx, cy) = match &o.motion {
            MotionProfile::ConstantVelocity { velocity } => (x0 + velocity[0] * t, y0 + velocity[1] * t),
            MotionProfile::Sinusoidal {
                velocity,
                amplitude,
                period,
                phase,
            } => {
                let s = (TAU * t / period + phase).sin() - phase.sin();
                (x0 + velocity[0] * t + amplitude[0] * s, y0 + velocity[1] * t + amplitude[1] * s)
            }
            MotionProfile::Crossover { end } => {
                let span = (last - o.first_frame).max(1) as f64;
                let a = t / span;
                (x0 + (end[0] - x0) * a, y0 + (end[1] - y0) * a)
            }
        };
        let (w, h) = (self.image_width as f64, self.image_height as f64);
        if !(0.0..=w).contains(&cx) || !(0.0..=h).contains(&cy) {
            return None;
        }
        Some([cx - 0.5 * o.size[0], cy - 0.5 * o.size[1], o.size[0], o.size[1]])
    }
}

/// One opaque rectangle of the rendered scene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    /// Object id, or `None` for an occlusion screen.
    pub id: Option<i64>,
    pub bbox: PixelBox,
    pub depth: f64,
}

/// Per-id stripe pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Texture {
    direction: [f64; 2],
    cycles: f64,
    colors: [[f32; 3]; 3],
    band: f64,
}

impl Texture {
    fn for_id(id: i64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ id as u64);
        let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let mut color = || -> [f32; 3] { [rng.random(), rng.random(), rng.random()] };
        let colors = [color(), color(), color()];
        Self {
            direction: [angle.cos(), angle.sin()],
            cycles: rng.random_range(2.0..7.0),
            colors,
            band: rng.random_range(0.3..0.7),
        }
    }

    fn sample(&self, u: f64, v: f64) -> [f32; 3] {
        if v > self.band {
            return self.colors[2];
        }
        let s = (self.cycles * (u * self.direction[0] + v * self.direction[1])).rem_euclid(1.0);
        if s < 0.5 {
            self.colors[0]
        } else {
            self.colors[1]
        }
    }
}

const SCREEN: [f32; 3] = [0.35, 0.35, 0.38];

fn background(x: f64, y: f64) -> [f32; 3] {
    let v = 0.5 + 0.04 * ((x / 37.0).sin() * (y / 29.0).cos());
    [v as f32, v as f32, (v + 0.03) as f32]
}

/// One frame's layers with their textures resolved.
struct Painter<'a> {
    layers: &'a [Layer],
    textures: Vec<Option<&'a Texture>>,
}

impl Painter<'_> {
    fn paint(&self, x: f64, y: f64) -> [f32; 3] {
        for (l, t) in self.layers.iter().zip(&self.textures) {
            let b = l.bbox;
            if x >= b[0] && x < b[0] + b[2] && y >= b[1] && y < b[1] + b[3] {
                return match t {
                    Some(t) => t.sample((x - b[0]) / b[2], (y - b[1]) / b[3]),
                    None => SCREEN,
                };
            }
        }
        background(x, y)
    }
}

/// Renders any pixel of any frame of a scenario from its noise-free layout.
#[derive(Debug, Clone)]
pub struct SceneRenderer {
    width: u32,
    height: u32,
    /// Front to back, per frame.
    layers: BTreeMap<u32, Vec<Layer>>,
    textures: BTreeMap<i64, Texture>,
}

impl SceneRenderer {
    pub fn new(s: &SimScenario) -> Result<Self> {
        s.validate()?;
        let mut layers: BTreeMap<u32, Vec<Layer>> = BTreeMap::new();
        let mut textures = BTreeMap::new();
        for frame in 1..=s.frames {
            let mut v = Vec::new();
            for (k, o) in s.objects.iter().enumerate() {
                if let Some(b) = s.object_box(k, frame) {
                    let id = k as i64 + 1;
                    textures.entry(id).or_insert_with(|| Texture::for_id(id));
                    v.push(Layer {
                        id: Some(id),
                        bbox: b,
                        depth: o.depth,
                    });
                }
            }
            for e in &s.occlusions {
                if frame < e.start || frame >= e.start + e.duration {
                    continue;
                }
                if let Some(b) = s.object_box(e.object as usize - 1, frame) {
                    v.push(Layer {
                        id: None,
                        bbox: [b[0], b[1], b[2] * e.coverage, b[3]],
                        depth: f64::INFINITY,
                    });
                }
            }
            // Nearest first; later ids sit in front on ties.
            v.sort_by(|a, b| b.depth.total_cmp(&a.depth).then(b.id.cmp(&a.id)));
            layers.insert(frame, v);
        }
        Ok(Self {
            width: s.image_width,
            height: s.image_height,
            layers,
            textures,
        })
    }

    pub fn layers(&self, frame: u32) -> &[Layer] {
        self.layers.get(&frame).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn pixel(&self, frame: u32, x: f64, y: f64) -> [f32; 3] {
        self.painter(frame).paint(x, y)
    }

    fn painter(&self, frame: u32) -> Painter<'_> {
        let layers = self.layers(frame);
        Painter {
            layers,
            textures: layers.iter().map(|l| l.id.map(|id| &self.textures[&id])).collect(),
        }
    }

    /// The scene inside `bbox` as a camera would see it: the covered pixels
    /// are rendered and resampled exactly like a crop of
    /// [`SceneRenderer::render_frame`].
    pub fn crop(&self, frame: u32, bbox: &PixelBox) -> Result<ImageCrop> {
        let rect = CropRect::new(self.width as usize, self.height as usize, bbox[0], bbox[1], bbox[2], bbox[3])?;
        let (x0, x1, y0, y1) = rect.footprint();
        let painter = self.painter(frame);
        let pw = x1 - x0 + 1;
        let mut patch = Vec::with_capacity(pw * (y1 - y0 + 1));
        for y in y0..=y1 {
            for x in x0..=x1 {
                patch.push(painter.paint(x as f64 + 0.5, y as f64 + 0.5));
            }
        }
        rect.resample(3, |x, y, c| patch[(y - y0) * pw + (x - x0)][c])
    }

    pub fn render_frame(&self, frame: u32) -> Result<Frame> {
        let (w, h) = (self.width as usize, self.height as usize);
        let painter = self.painter(frame);
        let mut data = Vec::with_capacity(w * h * 3);
        for y in 0..h {
            for x in 0..w {
                data.extend(painter.paint(x as f64 + 0.5, y as f64 + 0.5));
            }
        }
        Frame::new(w, h, 3, data)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimDetection {
    pub record: DetectionRecord,
    /// Object that produced the box; `None` for false positives.
    pub source: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub ground_truth: Vec<GroundTruthRecord>,
    pub detections: Vec<SimDetection>,
    pub renderer: SceneRenderer,
}

impl SimOutput {
    pub fn detection_records(&self) -> Vec<DetectionRecord> {
        self.detections.iter().map(|d| d.record.clone()).collect()
    }

    pub fn crop(&self, d: &DetectionRecord) -> Result<ImageCrop> {
        self.renderer.crop(d.frame, &d.bbox)
    }
}

fn to_norm(b: &PixelBox, w: f64, h: f64) -> Result<BBox2D> {
    BBox2D::from_ltwh(b[0], b[1], b[2], b[3], w, h)
}

/// Generate ground truth and detections. Deterministic in `seed`.
pub fn simulate(s: &SimScenario, seed: u64) -> Result<SimOutput> {
    let renderer = SceneRenderer::new(s)?;
    let (w, h) = (s.image_width as f64, s.image_height as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, s.noise_std).map_err(|e| invalid(e.to_string()))?;
    let mut ground_truth = Vec::new();
    let mut detections = Vec::new();
    for frame in 1..=s.frames {
        let layers = renderer.layers(frame);
        for (rank, layer) in layers.iter().enumerate() {
            let Some(id) = layer.id else { continue };
            let b = to_norm(&layer.bbox, w, h)?;
            let front: Vec<BBox2D> = layers[..rank]
                .iter()
                .map(|l| to_norm(&l.bbox, w, h))
                .collect::<Result<_>>()?;
            let visibility = 1.0 - occlusion_fraction(&b, &front);
            let class_label = s.objects[id as usize - 1].class.clone();
            ground_truth.push(GroundTruthRecord {
                frame,
                track_id: id,
                bbox: layer.bbox,
                class_label: class_label.clone(),
                visibility,
                consider: true,
            });
            // Draw unconditionally so the stream does not depend on visibility.
            let miss = rng.random::<f64>() < s.miss_rate;
            let jitter: [f64; 4] = std::array::from_fn(|_| noise.sample(&mut rng));
            let confidence = rng.random_range(0.7..1.0);
            if miss || visibility < s.min_visibility {
                continue;
            }
            let mut bbox = layer.bbox;
            if s.noise_std > 0.0 {
                for (v, j) in bbox.iter_mut().zip(jitter) {
                    *v += j;
                }
                bbox[2] = bbox[2].max(1.0);
                bbox[3] = bbox[3].max(1.0);
            }
            detections.push(SimDetection {
                record: DetectionRecord {
                    frame,
                    bbox,
                    confidence,
                    class_label,
                },
                source: Some(id),
            });
        }
        if !s.objects.is_empty() && rng.random::<f64>() < s.false_positive_rate {
            let k = rng.random_range(0..s.objects.len());
            let [bw, bh] = s.objects[k].size;
            let left = rng.random_range(0.0..(w - bw).max(1.0));
            let top = rng.random_range(0.0..(h - bh).max(1.0));
            detections.push(SimDetection {
                record: DetectionRecord {
                    frame,
                    bbox: [left, top, bw, bh],
                    confidence: rng.random_range(0.3..0.6),
                    class_label: s.objects[k].class.clone(),
                },
                source: None,
            });
        }
    }
    ground_truth.sort_by_key(|g| (g.frame, g.track_id));
    Ok(SimOutput {
        ground_truth,
        detections,
        renderer,
    })
}

/// `n` objects in horizontal lanes moving at constant velocity, no noise,
/// no occlusion. Objects cover 300 px over the sequence, at most
/// [`CLEAN_MAX_SPEED`] px per frame.
pub fn clean_scenario(n: usize, frames: u32) -> SimScenario {
    let (w, h) = (640.0, 480.0);
    let speed = (300.0 / frames.max(1) as f64).min(CLEAN_MAX_SPEED);
    let lane = h / (n as f64 + 1.0);
    let objects = (0..n)
        .map(|k| {
            let dir = if k % 2 == 0 { 1.0 } else { -1.0 };
            SimObject {
                class: default_class(),
                start: [w * 0.5 - dir * 150.0, lane * (k as f64 + 1.0)],
                size: [30.0, (lane * 0.8).min(80.0)],
                depth: k as f64,
                first_frame: 1,
                last_frame: None,
                motion: MotionProfile::ConstantVelocity {
                    velocity: [dir * speed, 0.2 * k as f64],
                },
            }
        })
        .collect();
    SimScenario {
        frames,
        image_width: w as u32,
        image_height: h as u32,
        noise_std: 0.0,
        false_positive_rate: 0.0,
        miss_rate: 0.0,
        min_visibility: 0.5,
        objects,
        occlusions: Vec::new(),
    }
}

pub const CLEAN_MAX_SPEED: f64 = 4.0;

/// Id of the object hidden in [`occlusion_scenario`].
pub const OCCLUDED_ID: i64 = 5;

/// A street-like scene: six pedestrians, two of them crossing each other and
/// object 5 passing behind a screen for `occlusion` frames. Layout and
/// speeds vary with `seed`.
pub fn occlusion_scenario(seed: u64, frames: u32, occlusion: u32) -> Result<SimScenario> {
    if occlusion == 0 || occlusion + 20 > frames {
        return Err(invalid("occlusion must be shorter than the sequence minus 20 frames"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0cc1_u64);
    let (w, h) = (960.0, 540.0);
    let f = frames as f64;
    let mut jitter = |a: f64, b: f64| rng.random_range(a..b);
    let ped = |start: [f64; 2], depth: f64, motion: MotionProfile| SimObject {
        class: default_class(),
        start,
        size: [36.0, 90.0],
        depth,
        first_frame: 1,
        last_frame: None,
        motion,
    };
    let objects = vec![
        ped(
            [jitter(60.0, 120.0), jitter(90.0, 130.0)],
            1.0,
            MotionProfile::ConstantVelocity {
                velocity: [jitter(500.0, 700.0) / f, jitter(-20.0, 20.0) / f],
            },
        ),
        ped(
            [jitter(100.0, 160.0), jitter(250.0, 290.0)],
            2.0,
            MotionProfile::Crossover {
                end: [jitter(760.0, 840.0), jitter(330.0, 370.0)],
            },
        ),
        ped(
            [jitter(780.0, 860.0), jitter(330.0, 370.0)],
            3.0,
            MotionProfile::Crossover {
                end: [jitter(100.0, 160.0), jitter(250.0, 290.0)],
            },
        ),
        ped(
            [jitter(820.0, 900.0), jitter(430.0, 470.0)],
            4.0,
            MotionProfile::Sinusoidal {
                velocity: [-jitter(400.0, 600.0) / f, 0.0],
                amplitude: [0.0, jitter(10.0, 25.0)],
                period: jitter(60.0, 90.0),
                phase: 0.0,
            },
        ),
        ped(
            [jitter(100.0, 160.0), jitter(170.0, 200.0)],
            0.0,
            MotionProfile::ConstantVelocity {
                velocity: [jitter(550.0, 700.0) / f, jitter(-10.0, 10.0) / f],
            },
        ),
        ped(
            [jitter(420.0, 540.0), jitter(20.0, 60.0) + 400.0],
            5.0,
            MotionProfile::Sinusoidal {
                velocity: [jitter(-60.0, 60.0) / f, 0.0],
                amplitude: [jitter(15.0, 30.0), 0.0],
                period: jitter(50.0, 80.0),
                phase: 0.0,
            },
        ),
    ];
    let start = (frames - occlusion) / 2;
    Ok(SimScenario {
        frames,
        image_width: w as u32,
        image_height: h as u32,
        noise_std: 1.0,
        false_positive_rate: 0.05,
        miss_rate: 0.01,
        min_visibility: 0.5,
        objects,
        occlusions: vec![OcclusionEvent {
            object: OCCLUDED_ID as u32,
            start,
            duration: occlusion,
            coverage: 1.0,
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single() -> SimScenario {
        let mut s = clean_scenario(1, 30);
        s.objects[0].motion = MotionProfile::Sinusoidal {
            velocity: [2.0, 0.0],
            amplitude: [0.0, 10.0],
            period: 12.0,
            phase: 0.3,
        };
        s
    }

    #[test]
    fn clean_detections_equal_ground_truth() {
        let out = simulate(&single(), 3).unwrap();
        assert_eq!(out.detections.len(), out.ground_truth.len());
        for (d, g) in out.detections.iter().zip(&out.ground_truth) {
            assert_eq!((d.record.frame, d.record.bbox), (g.frame, g.bbox));
            assert_eq!(g.visibility, 1.0);
        }
    }

    #[test]
    fn screen_suppresses_detections() {
        let mut s = single();
        s.occlusions.push(OcclusionEvent {
            object: 1,
            start: 5,
            duration: 20,
            coverage: 1.0,
        });
        let out = simulate(&s, 0).unwrap();
        let frames: Vec<u32> = out.detections.iter().map(|d| d.record.frame).collect();
        assert_eq!(frames.len(), 10);
        assert!(frames.iter().all(|f| !(5..25).contains(f)));
        let hidden = out.ground_truth.iter().filter(|g| g.visibility == 0.0).count();
        assert_eq!(hidden, 20);
    }

    #[test]
    fn partial_screen_sets_visibility() {
        let mut s = single();
        s.occlusions.push(OcclusionEvent {
            object: 1,
            start: 1,
            duration: 30,
            coverage: 0.25,
        });
        let out = simulate(&s, 0).unwrap();
        for g in &out.ground_truth {
            assert!((g.visibility - 0.75).abs() < 1e-9);
        }
        assert_eq!(out.detections.len(), 30);
    }

    #[test]
    fn same_seed_same_output() {
        let s = occlusion_scenario(4, 120, 25).unwrap();
        let a = simulate(&s, 11).unwrap();
        let b = simulate(&s, 11).unwrap();
        assert_eq!(a.ground_truth, b.ground_truth);
        assert_eq!(a.detections, b.detections);
        let c = simulate(&s, 12).unwrap();
        assert_ne!(a.detections, c.detections);
    }

    #[test]
    fn scenario_toml_round_trip() {
        let s = occlusion_scenario(1, 100, 20).unwrap();
        assert_eq!(SimScenario::from_toml(&s.to_toml()).unwrap(), s);
        assert!(SimScenario::from_toml("frames = 0\nimage_width = 1\nimage_height = 1\n").is_err());
        assert!(SimScenario::from_toml("frame = 3\n").is_err());
    }

    #[test]
    fn crops_show_the_object_texture() {
        let out = simulate(&single(), 0).unwrap();
        let d = &out.detections[3].record;
        let crop = out.crop(d).unwrap();
        let t = Texture::for_id(1);
        // Bottom band is a flat colour.
        let px = crop.get(60, 120, 0);
        assert_eq!(px, t.colors[2][0]);
        let other = Texture::for_id(2);
        assert_ne!(t, other);
    }
}
