//! Contract tests for the `shadowtrack` binary: subcommand outputs, flags,
//! and exit codes (0 success, 1 usage, 2 data).

use std::path::Path;
use std::process::{Command, Output};

use shadowtrack::eval::{read_gt_csv, read_predictions_csv, EvalReport};
use shadowtrack::imaging::{load_frame, save_frame, Frame, ImageFormat};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shadowtrack"))
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary spawns")
}

fn synth_sequence(dir: &Path, preset: &str, frames: usize) {
    let out = run(bin()
        .args([
            "synth", "--preset", preset, "--size", "200x120", "--seed", "5",
        ])
        .arg("--frames")
        .arg(frames.to_string())
        .arg("--format")
        .arg("pgm")
        .arg("--out")
        .arg(dir));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn synth_writes_frames_gt_and_spec() {
    let dir = tempfile::tempdir().unwrap();
    synth_sequence(dir.path(), "flat_easy", 8);

    for t in 0..8 {
        let path = dir.path().join(format!("frame_{t:06}.pgm"));
        let frame = load_frame(&path).unwrap();
        assert_eq!((frame.width(), frame.height()), (200, 120));
    }
    let gt = read_gt_csv(dir.path().join("gt.csv")).unwrap();
    assert_eq!(gt.boxes.len(), 8);

    let spec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("spec.json")).unwrap())
            .unwrap();
    assert_eq!(spec["width"], 200);
    assert_eq!(spec["height"], 120);
    assert_eq!(spec["frames"], 8);
    assert_eq!(spec["seed"], 5);
}

#[test]
fn synth_same_seed_is_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    synth_sequence(a.path(), "textured", 4);
    synth_sequence(b.path(), "textured", 4);
    assert_eq!(
        std::fs::read(a.path().join("gt.csv")).unwrap(),
        std::fs::read(b.path().join("gt.csv")).unwrap()
    );
    assert_eq!(
        std::fs::read(a.path().join("frame_000003.pgm")).unwrap(),
        std::fs::read(b.path().join("frame_000003.pgm")).unwrap()
    );
}

#[test]
fn synth_rejects_unknown_preset_listing_choices() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["synth", "--preset", "volcano", "--out"])
        .arg(dir.path()));
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    for name in [
        "flat_easy",
        "dark_crossing",
        "textured",
        "moving_distractor",
    ] {
        assert!(stderr.contains(name), "stderr must list {name}: {stderr}");
    }
}

#[test]
fn synth_accepts_spec_file() {
    let seq = tempfile::tempdir().unwrap();
    synth_sequence(seq.path(), "flat_easy", 4);
    let replay = tempfile::tempdir().unwrap();
    let out = run(bin()
        .arg("synth")
        .arg("--spec")
        .arg(seq.path().join("spec.json"))
        .arg("--out")
        .arg(replay.path()));
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(seq.path().join("gt.csv")).unwrap(),
        std::fs::read(replay.path().join("gt.csv")).unwrap()
    );
}

#[test]
fn track_writes_predictions_and_metadata() {
    let seq = tempfile::tempdir().unwrap();
    synth_sequence(seq.path(), "flat_easy", 8);
    let gt = read_gt_csv(seq.path().join("gt.csv")).unwrap();
    let b = gt.boxes[0];

    let out_dir = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["track", "--overlay", "--init"])
        .arg(format!("{},{},{},{}", b.cx, b.cy, b.w, b.h))
        .arg("--in")
        .arg(seq.path())
        .arg("--out")
        .arg(out_dir.path()));
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let steps = read_predictions_csv(out_dir.path().join("predictions.csv")).unwrap();
    assert_eq!(steps.len(), 8, "one row per frame");
    assert_eq!(steps[0].bbox, b, "frame 0 carries the init box");

    // The resolved configuration round-trips through run.json.
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.path().join("run.json")).unwrap())
            .unwrap();
    assert_eq!(meta["config"]["padding_factor"], 2.0);
    assert_eq!(meta["config"]["fusion_enabled"], true);
    assert_eq!(meta["config"]["filter"]["learning_rate"], 0.125);
    assert_eq!(meta["frames"], 8);
    assert!(meta["fps"].as_f64().unwrap() > 0.0);

    for t in 0..8 {
        assert!(
            out_dir.path().join(format!("overlay_{t:06}.png")).exists(),
            "overlay frame {t} missing"
        );
    }
}

#[test]
fn track_requires_init_flag() {
    let out = run(bin().args(["track", "--in", "a", "--out", "b"]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn track_rejects_empty_directory() {
    let seq = tempfile::tempdir().unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["track", "--init", "50,50,10,10", "--in"])
        .arg(seq.path())
        .arg("--out")
        .arg(out_dir.path()));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no frame"));
}

#[test]
fn track_rejects_inconsistent_frame_dims() {
    let seq = tempfile::tempdir().unwrap();
    synth_sequence(seq.path(), "flat_easy", 4);
    // Corrupt the sequence with a frame of different dimensions.
    let odd = Frame::filled(64, 64, 128.0).unwrap();
    save_frame(&odd, seq.path().join("frame_000002.pgm"), ImageFormat::Pgm).unwrap();

    let gt = read_gt_csv(seq.path().join("gt.csv")).unwrap();
    let b = gt.boxes[0];
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["track", "--init"])
        .arg(format!("{},{},{},{}", b.cx, b.cy, b.w, b.h))
        .arg("--in")
        .arg(seq.path())
        .arg("--out")
        .arg(out_dir.path()));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_reports_perfect_prediction_and_honors_window() {
    let seq = tempfile::tempdir().unwrap();
    synth_sequence(seq.path(), "flat_easy", 30);

    // A "prediction" that copies the ground truth exactly.
    let gt = read_gt_csv(seq.path().join("gt.csv")).unwrap();
    let steps: Vec<shadowtrack::tracker::TrackStep> = gt
        .boxes
        .iter()
        .enumerate()
        .map(|(i, &bbox)| shadowtrack::tracker::TrackStep {
            frame_index: i,
            bbox,
            mode: shadowtrack::tracker::Mode::Normal,
            peak: 1.0,
            shadow_area: 0.0,
        })
        .collect();
    let pred_dir = tempfile::tempdir().unwrap();
    let pred = pred_dir.path().join("predictions.csv");
    shadowtrack::eval::write_predictions_csv(&pred, &steps).unwrap();

    let report_path = pred_dir.path().join("report.json");
    let iou_path = pred_dir.path().join("iou.csv");
    let out = run(bin()
        .args(["eval", "--window", "2:27", "--pred"])
        .arg(&pred)
        .arg("--gt")
        .arg(seq.path().join("gt.csv"))
        .arg("--report")
        .arg(&report_path)
        .arg("--iou-csv")
        .arg(&iou_path));
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("mean IoU"));

    let report: EvalReport =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report.mean_iou, 1.0);
    assert!(!report.lost);
    assert_eq!(report.first_frame, 2);
    assert_eq!(report.frames, 25);

    let iou_text = std::fs::read_to_string(&iou_path).unwrap();
    assert!(iou_text.starts_with("frame,iou\n2,"));
    assert_eq!(iou_text.lines().count(), 26);
}

#[test]
fn eval_rejects_disjoint_indices() {
    let seq = tempfile::tempdir().unwrap();
    synth_sequence(seq.path(), "flat_easy", 6);
    let pred_dir = tempfile::tempdir().unwrap();
    let pred = pred_dir.path().join("predictions.csv");
    std::fs::write(
        &pred,
        "frame,cx,cy,w,h,mode,peak,area\n3,10,10,4,4,normal,1,0\n",
    )
    .unwrap();
    let out = run(bin()
        .arg("eval")
        .arg("--pred")
        .arg(&pred)
        .arg("--gt")
        .arg(seq.path().join("gt.csv")));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mask_writes_raw_and_clean_pgms() {
    let seq = tempfile::tempdir().unwrap();
    synth_sequence(seq.path(), "flat_easy", 3);

    let masks = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["mask", "--in"])
        .arg(seq.path())
        .arg("--out")
        .arg(masks.path()));
    assert!(out.status.success());
    for t in 0..3 {
        let raw = load_frame(masks.path().join(format!("raw_{t:06}.pgm"))).unwrap();
        let clean = load_frame(masks.path().join(format!("clean_{t:06}.pgm"))).unwrap();
        // The synthetic shadow shows up in both masks.
        assert!(raw.data().iter().any(|&v| v > 0.0), "raw mask {t} is empty");
        assert!(
            clean.data().iter().any(|&v| v > 0.0),
            "clean mask {t} is empty"
        );
    }

    // --raw skips mask cleanup entirely.
    let raw_only = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["mask", "--raw", "--in"])
        .arg(seq.path())
        .arg("--out")
        .arg(raw_only.path()));
    assert!(out.status.success());
    assert!(raw_only.path().join("raw_000000.pgm").exists());
    assert!(!raw_only.path().join("clean_000000.pgm").exists());
}

#[test]
fn mask_of_uniform_frames_is_black() {
    let seq = tempfile::tempdir().unwrap();
    for t in 0..2 {
        let frame = Frame::filled(64, 48, 180.0).unwrap();
        save_frame(
            &frame,
            seq.path().join(format!("frame_{t:06}.pgm")),
            ImageFormat::Pgm,
        )
        .unwrap();
    }
    let masks = tempfile::tempdir().unwrap();
    let out = run(bin()
        .args(["mask", "--in"])
        .arg(seq.path())
        .arg("--out")
        .arg(masks.path()));
    assert!(out.status.success());
    let raw = load_frame(masks.path().join("raw_000000.pgm")).unwrap();
    assert!(raw.data().iter().all(|&v| v == 0.0));
}
