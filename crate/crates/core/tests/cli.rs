use std::fs;
use std::path::Path;

use siamtrack::cli::run;

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["siamtrack"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn digest(out: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix("digest "))
        .expect("digest line")
        .to_string()
}

#[test]
fn help_and_version_exit_zero() {
    let h = cli(&["--help"]);
    assert_eq!(h.code, 0);
    for sub in ["track", "eval", "simulate", "train-motion", "train-bev", "bev-loss"] {
        assert!(h.out.contains(sub), "help lists {sub}");
    }
    assert_eq!(cli(&["--version"]).code, 0);
    assert_eq!(cli(&["track", "--help"]).code, 0);
}

#[test]
fn usage_errors_exit_one() {
    let r = cli(&["track", "--bogus"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("--bogus"));
    assert_eq!(cli(&[]).code, 1);
    assert_eq!(cli(&["eval", "--gt", "x.txt"]).code, 1, "missing --hyp");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    assert_eq!(cli(&["simulate", "--preset", "crowd", "--output", p(&out)]).code, 1);
    assert_eq!(cli(&["simulate", "--output", p(&out)]).code, 1);
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing");
    let r = cli(&["track", "--dataset", p(&missing), "--output", p(&dir.path().join("t.txt"))]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("manifest.toml"), "{}", r.err);

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1,1,10,10,5,5,1,1\n").unwrap();
    let r = cli(&["eval", "--gt", p(&bad), "--hyp", p(&bad)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("bad.txt:1"), "{}", r.err);
}

#[test]
fn simulate_is_deterministic_in_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run_with = |name: &str, seed: &str| {
        let r = cli(&["simulate", "--preset", "occlusion", "--frames", "40", "--occlusion", "8", "--seed", seed, "--output", p(&dir.path().join(name))]);
        assert_eq!(r.code, 0, "{}", r.err);
        digest(&r.out)
    };
    let a = run_with("a", "7");
    assert_eq!(a, run_with("b", "7"));
    assert_ne!(a, run_with("c", "8"));
    assert_eq!(
        fs::read(dir.path().join("a/det.txt")).unwrap(),
        fs::read(dir.path().join("b/det.txt")).unwrap()
    );
}

#[test]
fn eval_of_identical_files_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    assert_eq!(cli(&["simulate", "--preset", "clean", "--frames", "20", "--output", p(&ds)]).code, 0);
    let gt = ds.join("gt.txt");
    let r = cli(&["eval", "--gt", p(&gt), "--hyp", p(&gt)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("MOTA            1.000"), "{}", r.out);
    assert!(r.out.contains("ID switches         0"), "{}", r.out);
}

#[test]
fn simulate_track_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    let tracks = dir.path().join("tracks.txt");
    let svg = dir.path().join("svg");
    assert_eq!(cli(&["simulate", "--preset", "clean", "--objects", "2", "--frames", "30", "--output", p(&ds)]).code, 0);
    let r = cli(&["track", "--dataset", p(&ds), "--output", p(&tracks), "--svg", p(&svg), "--parallel", "false"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("2 tracks"), "{}", r.out);
    assert!(svg.join("000001.svg").exists() && svg.join("000030.svg").exists());
    let r = cli(&["eval", "--gt", p(&ds.join("gt.txt")), "--hyp", p(&tracks)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("MOTA            1.000"), "{}", r.out);
}

#[test]
fn track_from_detections_and_rendered_frames() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    let tracks = dir.path().join("tracks.txt");
    assert_eq!(cli(&["simulate", "--preset", "clean", "--objects", "1", "--frames", "12", "--images", "--output", p(&ds)]).code, 0);
    assert!(ds.join("img/000001.png").exists());
    let r = cli(&["track", "--detections", p(&ds.join("det.txt")), "--images", p(&ds.join("img")), "--output", p(&tracks)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let r = cli(&["eval", "--gt", p(&ds.join("gt.txt")), "--hyp", p(&tracks)]);
    assert!(r.out.contains("MOTA            1.000"), "{}", r.out);

    // Both crop sources at once is ambiguous.
    let r = cli(&["track", "--detections", p(&ds.join("det.txt")), "--images", p(&ds.join("img")), "--scenario", p(&ds.join("scenario.toml")), "--output", p(&tracks)]);
    assert_eq!(r.code, 1);
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[simulate]\npreset = \"clean\"\nobjects = 1\nframes = 12\n\n[eval]\niou = 0.5\n",
    )
    .unwrap();
    let a = dir.path().join("a");
    let r = cli(&["simulate", "--config", p(&cfg), "--output", p(&a)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.starts_with("wrote 12 frames, 1 objects"), "{}", r.out);

    // Flags win over the file.
    let b = dir.path().join("b");
    let r = cli(&["simulate", "--config", p(&cfg), "--frames", "7", "--output", p(&b)]);
    assert!(r.out.starts_with("wrote 7 frames"), "{}", r.out);

    fs::write(&cfg, "[simulate]\nframez = 3\n").unwrap();
    let r = cli(&["simulate", "--config", p(&cfg), "--output", p(&b)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("framez"), "{}", r.err);
}

#[test]
fn trained_motion_checkpoint_drives_the_tracker() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("motion.ckpt");
    let r = cli(&["train-motion", "--synthetic", "50", "--steps", "1000", "--hidden", "16", "--output", p(&ck)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(ck.exists());

    let ds = dir.path().join("ds");
    let tracks = dir.path().join("tracks.txt");
    assert_eq!(cli(&["simulate", "--preset", "clean", "--objects", "2", "--frames", "20", "--output", p(&ds)]).code, 0);
    let r = cli(&["track", "--dataset", p(&ds), "--motion", "lstm", "--checkpoint", p(&ck), "--output", p(&tracks)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let r = cli(&["eval", "--gt", p(&ds.join("gt.txt")), "--hyp", p(&tracks)]);
    assert!(r.out.contains("MOTA            1.000"), "{}", r.out);

    assert_eq!(cli(&["track", "--dataset", p(&ds), "--motion", "lstm", "--output", p(&tracks)]).code, 1);
    assert_eq!(cli(&["track", "--dataset", p(&ds), "--motion", "particle", "--output", p(&tracks)]).code, 1);
}

#[test]
fn bev_training_and_loss_report() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("bev.ckpt");
    let r = cli(&["train-bev", "--synthetic", "5", "--steps", "200", "--hidden", "8", "--output", p(&ck)]);
    assert_eq!(r.code, 0, "{}", r.err);

    let gt = dir.path().join("gt.scene");
    let pred = dir.path().join("pred.scene");
    let refined = dir.path().join("refined.scene");
    fs::write(&gt, "1 1 car 0 0.8 20 1.5 1.6 3.9 0\n1 2 car 1.56 0.8 23.86 1.5 1.6 3.9 0\n").unwrap();
    fs::write(&pred, "1 1 car 0.3 0.8 20.4 1.5 1.6 3.9 0.05\n1 2 car 1.1 0.8 23.3 1.5 1.6 3.9 -0.05\n").unwrap();
    let r = cli(&["bev-loss", "--pred", p(&pred), "--gt", p(&gt)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let r = cli(&["bev-loss", "--pred", p(&pred), "--gt", p(&gt), "--checkpoint", p(&ck), "--refine", "--steps", "200", "--output", p(&refined)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(fs::read_to_string(&refined).unwrap().lines().count(), 2);

    fs::write(&pred, "1 1 car 0.3 0.8 20.4 1.5 1.6 3.9\n").unwrap();
    assert_eq!(cli(&["bev-loss", "--pred", p(&pred), "--gt", p(&gt)]).code, 2);
}
