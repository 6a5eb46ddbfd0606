//! Command-line front end.
//!
//! Every subcommand accepts `--config FILE`, a TOML document with one table
//! per subcommand (`[track]`, `[train-motion]`, ...) whose keys are the long
//! flag names. Flags given on the command line win over the file.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::association::{Predictor, Tracker, TrackerConfig};
use crate::bev::{
    bev_samples_from_track, intersection_penalty, pair_overlap, pair_scenes, parse_scene, pred_loss, refine,
    stationarity_check, write_scene, BevLearnables, BevPredictor, BevSample, ParamMask, RefineConfig, SceneRecord,
};
use crate::error::Error;
use crate::eval::{
    clean_scenario, load_dataset, occlusion_scenario, parse_mot, run_sequence, score, tracklets_2d, tracklets_3d,
    write_dataset, write_svg, write_tracks, CropSource, GroundTruthRecord, MotData, SceneRenderer, SimScenario,
    TrackRecord, TrackletConfig,
};
use crate::geometry::BBox2D;
use crate::motion::{samples_from_track, Checkpoint, MotionConfig, MotionModel, TrainingSample};

#[derive(Debug, Parser)]
#[command(name = "siamtrack", version, about = "Online multi-object tracking by detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Track detections and write MOT-format results.
    Track(TrackArgs),
    /// Score tracking results against ground truth.
    Eval(EvalArgs),
    /// Generate a synthetic dataset from a scenario.
    Simulate(SimulateArgs),
    /// Train the LSTM motion predictor.
    TrainMotion(TrainMotionArgs),
    /// Train the 3D box delta predictor.
    TrainBev(TrainBevArgs),
    /// Report 3D parameter and overlap losses for a scene.
    BevLoss(BevLossArgs),
}

/// Fill unset command-line options from the config file.
macro_rules! merge {
    ($cli:expr, $file:expr; $($field:ident),* $(,)?) => {
        $( if $cli.$field.is_none() { $cli.$field = $file.$field.take(); } )*
    };
}

#[derive(Debug, Args, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct TrackArgs {
    /// Simulated dataset directory (manifest.toml).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// MOT detection file, used with --images or --scenario.
    #[arg(long)]
    detections: Option<PathBuf>,
    /// Directory of frames named 000001.png, 000002.png, ...
    #[arg(long)]
    images: Option<PathBuf>,
    /// Scenario whose procedural rendering supplies the crops.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    width: Option<u32>,
    #[arg(long)]
    height: Option<u32>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Write one SVG overlay per frame into this directory.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// `kalman` or `lstm`.
    #[arg(long)]
    motion: Option<String>,
    /// Motion checkpoint for `--motion lstm`.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    n_init: Option<u32>,
    #[arg(long)]
    max_age: Option<u32>,
    #[arg(long)]
    gate_threshold: Option<f64>,
    #[arg(long)]
    gate_cost: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    class_gating: Option<bool>,
    #[arg(long)]
    appearance_scale: Option<f64>,
    #[arg(long)]
    appearance_decay: Option<f64>,
    /// Encode crops on all cores.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    parallel: Option<bool>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct EvalArgs {
    #[arg(long)]
    gt: Option<PathBuf>,
    #[arg(long)]
    hyp: Option<PathBuf>,
    #[arg(long)]
    iou: Option<f64>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct SimulateArgs {
    /// Scenario TOML file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Built-in scenario: `clean` or `occlusion`.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    objects: Option<usize>,
    #[arg(long)]
    frames: Option<u32>,
    /// Occlusion length for the `occlusion` preset.
    #[arg(long)]
    occlusion: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write rendered PNG frames.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    images: Option<bool>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct TrainMotionArgs {
    /// Train on the ground-truth trajectories of this dataset.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Train on this many synthetic tracklets instead.
    #[arg(long)]
    synthetic: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct TrainBevArgs {
    /// Scene file of 3D box tracks.
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Train on this many synthetic 3D tracklets per class instead.
    #[arg(long)]
    synthetic: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct BevLossArgs {
    /// Predicted boxes, scene format.
    #[arg(long)]
    pred: Option<PathBuf>,
    /// Ground-truth boxes, scene format.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// Take α, β and δ from a 3D predictor checkpoint.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Overlap weight applied to every class pair.
    #[arg(long)]
    xi: Option<f64>,
    /// Refine poses by gradient descent before reporting.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    refine: Option<bool>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Write the refined predictions here.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.into())
    }
}

type CliResult = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn require<T>(v: Option<T>, flag: &str) -> std::result::Result<T, Failure> {
    v.ok_or_else(|| usage(format!("missing required option --{flag}")))
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Track(a) => track(a, out),
        Command::Eval(a) => eval(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::TrainMotion(a) => train_motion(a, out),
        Command::TrainBev(a) => train_bev(a, out),
        Command::BevLoss(a) => bev_loss(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}\n\nFor more information, try '--help'.");
            1
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn load_section<T: DeserializeOwned + Default>(path: Option<&Path>, section: &str) -> std::result::Result<T, Failure> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = crate::error::read_text(path)?;
    let mut doc: BTreeMap<String, toml::Value> =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    match doc.remove(section) {
        None => Ok(T::default()),
        Some(v) => v
            .try_into()
            .map_err(|e| Failure::Data(Error::Config(format!("{} [{section}]: {e}", path.display())))),
    }
}

fn track(mut a: TrackArgs, out: &mut dyn Write) -> CliResult {
    let mut f: TrackArgs = load_section(a.config.as_deref(), "track")?;
    merge!(a, f; dataset, detections, images, scenario, width, height, output, svg, motion, checkpoint,
        n_init, max_age, gate_threshold, gate_cost, class_gating, appearance_scale, appearance_decay, parallel);
    let output = require(a.output, "output")?;

    let (records, crops, frames, w, h) = if let Some(dir) = &a.dataset {
        let d = load_dataset(dir)?;
        let crops = d.crop_source()?;
        (d.detections, crops, d.manifest.frames, d.manifest.image_width, d.manifest.image_height)
    } else {
        let path = a.detections.as_ref().ok_or_else(|| usage("give --dataset or --detections"))?;
        let records = parse_mot(path)?.detections;
        let frames = records.iter().map(|r| r.frame).max().unwrap_or(0);
        match (&a.images, &a.scenario) {
            (Some(dir), None) => {
                let (w, h) = match (a.width, a.height) {
                    (Some(w), Some(h)) => (w, h),
                    _ => {
                        let first = crate::eval::dataset::frame_path(dir, 1);
                        let img = crate::appearance::Frame::load(&first)?;
                        (img.width() as u32, img.height() as u32)
                    }
                };
                (records, CropSource::Images(dir.clone()), frames, w, h)
            }
            (None, Some(s)) => {
                let sc = SimScenario::load(s)?;
                let (w, h) = (sc.image_width, sc.image_height);
                let frames = frames.max(sc.frames);
                (records, CropSource::Procedural(Box::new(SceneRenderer::new(&sc)?)), frames, w, h)
            }
            _ => return Err(usage("--detections needs exactly one of --images or --scenario")),
        }
    };

    let mut cfg = TrackerConfig::default();
    let assoc = &mut cfg.association;
    assoc.n_init = a.n_init.unwrap_or(assoc.n_init);
    assoc.max_age = a.max_age.unwrap_or(assoc.max_age);
    assoc.gate_threshold = a.gate_threshold.unwrap_or(assoc.gate_threshold);
    assoc.gate_cost = a.gate_cost.unwrap_or(assoc.gate_cost);
    assoc.class_gating = a.class_gating.unwrap_or(assoc.class_gating);
    cfg.appearance.scale = a.appearance_scale.unwrap_or(cfg.appearance.scale);
    cfg.appearance.decay = a.appearance_decay.unwrap_or(cfg.appearance.decay);
    cfg.parallel_templates = a.parallel.unwrap_or(cfg.parallel_templates);
    let predictor = match a.motion.as_deref().unwrap_or("kalman") {
        "kalman" => Predictor::Kalman,
        "lstm" => {
            let ck = require(a.checkpoint, "checkpoint")?;
            Predictor::Lstm(Arc::new(MotionModel::load(&ck)?))
        }
        other => return Err(usage(format!("unknown motion model `{other}` (kalman, lstm)"))),
    };
    let mut tracker = Tracker::new(cfg, predictor)?;
    let start = Instant::now();
    let seq = run_sequence(&mut tracker, &records, frames, &crops, w as f64, h as f64)?;
    let elapsed = start.elapsed().as_secs_f64();
    write_tracks(&output, &seq.tracks)?;
    if let Some(dir) = &a.svg {
        fs::create_dir_all(dir)?;
        for (frame, dets) in &seq.detections {
            write_svg(&dir.join(format!("{frame:06}.svg")), w, h, dets, &seq.frame_tracks(*frame))?;
        }
    }
    let ids: std::collections::BTreeSet<i64> = seq.tracks.iter().map(|t| t.id).collect();
    writeln!(
        out,
        "tracked {} frames ({:.1} fps): {} tracks, {} boxes -> {}",
        seq.detections.len(),
        seq.detections.len() as f64 / elapsed.max(1e-9),
        ids.len(),
        seq.tracks.len(),
        output.display()
    )?;
    Ok(())
}

/// Ground-truth or tracking-output rows of a MOT file, as ground truth.
fn as_ground_truth(d: MotData) -> Vec<GroundTruthRecord> {
    if !d.ground_truth.is_empty() {
        return d.ground_truth;
    }
    d.tracks
        .into_iter()
        .map(|t| GroundTruthRecord {
            frame: t.frame,
            track_id: t.id,
            bbox: t.bbox,
            class_label: t.class_label,
            visibility: 1.0,
            consider: true,
        })
        .collect()
}

fn as_hypotheses(d: MotData) -> Vec<TrackRecord> {
    if !d.tracks.is_empty() {
        return d.tracks;
    }
    d.ground_truth
        .into_iter()
        .filter(|g| g.consider)
        .map(|g| TrackRecord {
            frame: g.frame,
            id: g.track_id,
            bbox: g.bbox,
            confidence: 1.0,
            class_label: g.class_label,
        })
        .collect()
}

fn eval(mut a: EvalArgs, out: &mut dyn Write) -> CliResult {
    let mut f: EvalArgs = load_section(a.config.as_deref(), "eval")?;
    merge!(a, f; gt, hyp, iou);
    let (gt, hyp) = (require(a.gt, "gt")?, require(a.hyp, "hyp")?);
    let gt = as_ground_truth(parse_mot(&gt)?);
    let hyp = as_hypotheses(parse_mot(&hyp)?);
    let m = score(&gt, &hyp, a.iou.unwrap_or(0.5))?;
    writeln!(out, "{:<12} {:>8}", "metric", "value")?;
    writeln!(out, "{:<12} {:>8.3}", "MOTA", m.mota)?;
    writeln!(out, "{:<12} {:>8.3}", "MOTP", m.motp)?;
    writeln!(out, "{:<12} {:>7.1}%  ({}/{})", "MT", 100.0 * m.mt, m.mostly_tracked, m.trajectories)?;
    writeln!(out, "{:<12} {:>7.1}%  ({}/{})", "ML", 100.0 * m.ml, m.mostly_lost, m.trajectories)?;
    writeln!(out, "{:<12} {:>8}", "ID switches", m.id_switches)?;
    writeln!(out, "{:<12} {:>8}", "FP", m.false_positives)?;
    writeln!(out, "{:<12} {:>8}", "FN", m.false_negatives)?;
    writeln!(out, "{:<12} {:>8}", "GT boxes", m.gt_count)?;
    Ok(())
}

fn simulate(mut a: SimulateArgs, out: &mut dyn Write) -> CliResult {
    let mut f: SimulateArgs = load_section(a.config.as_deref(), "simulate")?;
    merge!(a, f; scenario, preset, objects, frames, occlusion, seed, output, images);
    let output = require(a.output, "output")?;
    let seed = a.seed.unwrap_or(0);
    let scenario = match (&a.scenario, a.preset.as_deref()) {
        (Some(p), None) => SimScenario::load(p)?,
        (None, Some("clean")) => clean_scenario(a.objects.unwrap_or(3), a.frames.unwrap_or(100)),
        (None, Some("occlusion")) => occlusion_scenario(seed, a.frames.unwrap_or(200), a.occlusion.unwrap_or(25))?,
        (None, Some(other)) => return Err(usage(format!("unknown preset `{other}` (clean, occlusion)"))),
        _ => return Err(usage("give exactly one of --scenario or --preset")),
    };
    let m = write_dataset(&output, &scenario, seed, a.images.unwrap_or(false))?;
    writeln!(
        out,
        "wrote {} frames, {} objects to {}\ndigest {}",
        m.frames,
        scenario.objects.len(),
        output.display(),
        m.digest
    )?;
    Ok(())
}

/// Contiguous per-id runs of ground truth, normalized to the image.
fn gt_tracklets(gt: &[GroundTruthRecord], w: f64, h: f64) -> crate::Result<Vec<Vec<BBox2D>>> {
    let mut by_id: BTreeMap<i64, Vec<&GroundTruthRecord>> = BTreeMap::new();
    for g in gt {
        by_id.entry(g.track_id).or_default().push(g);
    }
    let mut out = Vec::new();
    for recs in by_id.values_mut() {
        recs.sort_by_key(|r| r.frame);
        let mut run: Vec<BBox2D> = Vec::new();
        let mut prev = None;
        for r in recs.iter() {
            if prev.is_some_and(|p: u32| p + 1 != r.frame) {
                out.push(std::mem::take(&mut run));
            }
            run.push(BBox2D::from_ltwh(r.bbox[0], r.bbox[1], r.bbox[2], r.bbox[3], w, h)?);
            prev = Some(r.frame);
        }
        out.push(run);
    }
    Ok(out)
}

fn report_losses(out: &mut dyn Write, losses: &[f64]) -> std::io::Result<()> {
    let k = (losses.len() / 10).max(1);
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len().max(1) as f64;
    writeln!(
        out,
        "{} steps, mean loss first {k}: {:.5}, last {k}: {:.5}",
        losses.len(),
        mean(&losses[..k.min(losses.len())]),
        mean(&losses[losses.len().saturating_sub(k)..])
    )
}

fn train_motion(mut a: TrainMotionArgs, out: &mut dyn Write) -> CliResult {
    let mut f: TrainMotionArgs = load_section(a.config.as_deref(), "train-motion")?;
    merge!(a, f; dataset, synthetic, output, steps, hidden, learning_rate, window, seed);
    let output = require(a.output, "output")?;
    let seed = a.seed.unwrap_or(0);
    let window = a.window.unwrap_or(10);
    let tracks = match (&a.dataset, a.synthetic) {
        (Some(dir), None) => {
            let d = load_dataset(dir)?;
            gt_tracklets(&d.ground_truth, d.manifest.image_width as f64, d.manifest.image_height as f64)?
        }
        (None, Some(n)) => tracklets_2d(n, &TrackletConfig::default(), seed)?,
        _ => return Err(usage("give exactly one of --dataset or --synthetic")),
    };
    let samples: Vec<TrainingSample> = tracks.iter().flat_map(|t| samples_from_track(t, window)).collect();
    let mut cfg = MotionConfig {
        seed,
        window,
        ..MotionConfig::default()
    };
    cfg.hidden_dim = a.hidden.unwrap_or(cfg.hidden_dim);
    cfg.learning_rate = a.learning_rate.unwrap_or(cfg.learning_rate);
    let mut model = MotionModel::new(&cfg);
    let losses = model.fit(&samples, a.steps.unwrap_or(20_000), seed)?;
    report_losses(out, &losses)?;
    model.save(&output)?;
    writeln!(out, "{} samples, checkpoint -> {}", samples.len(), output.display())?;
    Ok(())
}

fn train_bev(mut a: TrainBevArgs, out: &mut dyn Write) -> CliResult {
    let mut f: TrainBevArgs = load_section(a.config.as_deref(), "train-bev")?;
    merge!(a, f; scene, synthetic, output, steps, hidden, learning_rate, window, seed);
    let output = require(a.output, "output")?;
    let seed = a.seed.unwrap_or(0);
    let window = a.window.unwrap_or(8);
    let mut tracks: Vec<(String, Vec<crate::geometry::Box3D>)> = Vec::new();
    match (&a.scene, a.synthetic) {
        (Some(p), None) => {
            let mut by_id: BTreeMap<i64, Vec<SceneRecord>> = BTreeMap::new();
            for r in parse_scene(p)? {
                by_id.entry(r.id).or_default().push(r);
            }
            for recs in by_id.into_values() {
                let class = recs[0].class.clone();
                tracks.push((class, recs.into_iter().map(|r| r.bbox).collect()));
            }
        }
        (None, Some(n)) => {
            for (k, (class, size)) in [("car", [1.5, 1.6, 3.9]), ("pedestrian", [1.7, 0.6, 0.8])].into_iter().enumerate() {
                for t in tracklets_3d(n, 30, size, seed.wrapping_add(k as u64))? {
                    tracks.push((class.to_string(), t));
                }
            }
        }
        _ => return Err(usage("give exactly one of --scene or --synthetic")),
    }
    let classes: std::collections::BTreeSet<&str> = tracks.iter().map(|(c, _)| c.as_str()).collect();
    let classes: Vec<&str> = classes.into_iter().collect();
    let samples: Vec<BevSample> = tracks
        .iter()
        .flat_map(|(c, t)| bev_samples_from_track(c, t, window))
        .collect();
    let mut model = BevPredictor::new(
        a.hidden.unwrap_or(32),
        BevLearnables::new(&classes),
        a.learning_rate.unwrap_or(1e-3),
        seed,
    );
    let losses = model.fit(&samples, a.steps.unwrap_or(20_000), seed)?;
    report_losses(out, &losses)?;
    model.to_checkpoint().save(&output)?;
    writeln!(out, "{} samples, checkpoint -> {}", samples.len(), output.display())?;
    Ok(())
}

fn bev_loss(mut a: BevLossArgs, out: &mut dyn Write) -> CliResult {
    let mut f: BevLossArgs = load_section(a.config.as_deref(), "bev-loss")?;
    merge!(a, f; pred, gt, checkpoint, xi, refine, steps, learning_rate, output);
    let pred = parse_scene(&require(a.pred, "pred")?)?;
    let gt = parse_scene(&require(a.gt, "gt")?)?;
    let mut scenes = pair_scenes(&pred, &gt)?;
    let classes: std::collections::BTreeSet<String> = pred.iter().map(|r| r.class.clone()).collect();
    let mut learn = match &a.checkpoint {
        Some(p) => BevPredictor::from_checkpoint(&Checkpoint::load(p)?)?.learnables().clone(),
        None => BevLearnables::new(&classes.iter().collect::<Vec<_>>()),
    };
    for c in &classes {
        learn.beta.entry(c.clone()).or_insert(1.0);
    }
    if let Some(xi) = a.xi {
        for c1 in &classes {
            for c2 in &classes {
                learn.set_xi(c1, c2, xi);
            }
        }
    }
    learn.validate()?;
    let refine_cfg = RefineConfig {
        max_steps: a.steps.unwrap_or(RefineConfig::default().max_steps),
        learning_rate: a.learning_rate.unwrap_or(RefineConfig::default().learning_rate),
        ..RefineConfig::default()
    };
    writeln!(
        out,
        "{:>6} {:>7} {:>12} {:>12} {:>12} {:>12}",
        "frame", "objects", "pred_loss", "overlap_m2", "penalty", "total"
    )?;
    let mut sums = [0.0; 4];
    let mut residual = 0.0_f64;
    for (frame, scene) in scenes.iter_mut() {
        if a.refine.unwrap_or(false) {
            refine(scene, &learn, &refine_cfg)?;
            residual = residual.max(stationarity_check(scene, &learn, 1e-6, ParamMask::POSE)?.residual_norm);
        }
        let p = pred_loss(scene, &learn)?;
        let overlap: f64 = (0..scene.len())
            .flat_map(|i| (i + 1..scene.len()).map(move |j| (i, j)))
            .map(|(i, j)| pair_overlap(scene, i, j))
            .sum();
        let pen = intersection_penalty(scene, &learn);
        let row = [p, overlap, pen, p + pen];
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
        writeln!(
            out,
            "{frame:>6} {:>7} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            scene.len(),
            row[0],
            row[1],
            row[2],
            row[3]
        )?;
    }
    writeln!(
        out,
        "{:>6} {:>7} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
        "all",
        pred.len(),
        sums[0],
        sums[1],
        sums[2],
        sums[3]
    )?;
    if a.refine.unwrap_or(false) {
        writeln!(out, "max stationarity residual {residual:.3e}")?;
        if let Some(path) = &a.output {
            let mut recs = Vec::new();
            let mut ids = pred.iter();
            for (frame, scene) in &scenes {
                for o in &scene.objects {
                    let src = ids.next().expect("one record per object");
                    debug_assert_eq!(src.frame, *frame);
                    recs.push(SceneRecord {
                        frame: *frame,
                        id: src.id,
                        class: o.class.clone(),
                        bbox: o.pred,
                    });
                }
            }
            write_scene(path, &recs)?;
        }
    } else if a.output.is_some() {
        return Err(usage("--output needs --refine true"));
    }
    Ok(())
}
