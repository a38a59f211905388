//! Command-line front end: `track | synth | eval | mask`.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags or flag values),
//! 2 for data errors (missing/malformed inputs, misaligned sequences).
//! Identical invocations with identical inputs and seeds produce
//! byte-identical CSV outputs.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corr::FilterConfig;
use crate::eval;
use crate::imaging::{self, BoundingBox, Frame, ImageFormat};
use crate::shadow::{self, ShadowDetectorConfig};
use crate::synth::{self, Preset, ScenarioSpec};
use crate::tracker::{self, Mode, TrackerConfig};

#[derive(Parser)]
#[command(
    name = "shadowtrack",
    version,
    about = "Shadow-aware correlation-filter tracking for aerial image sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track a target through a frame sequence and write per-frame boxes.
    Track(TrackArgs),
    /// Generate a synthetic scenario: frames, ground truth, resolved spec.
    Synth(SynthArgs),
    /// Evaluate a prediction CSV against a ground-truth CSV.
    Eval(EvalArgs),
    /// Dump shadow-detection masks for inspection.
    Mask(MaskArgs),
}

#[derive(Args)]
struct TrackArgs {
    /// Directory holding frame_NNNNNN.png/.pgm files.
    #[arg(long = "in", value_name = "DIR")]
    input: PathBuf,
    /// Output directory for predictions.csv and run.json.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Initial target box on frame 0.
    #[arg(long, value_parser = parse_box, value_name = "CX,CY,W,H")]
    init: BoundingBox,
    /// Disable failure prediction and fusion (plain correlation baseline).
    #[arg(long)]
    no_fusion: bool,
    /// Write frames with the predicted box burned in (solid outline for
    /// normal steps, dashed for fusion steps).
    #[arg(long)]
    overlay: bool,
    /// Seed for the filter-training perturbations.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Search region scale over the target box.
    #[arg(long, default_value_t = 2.0)]
    padding: f64,
    /// Filter update rate in [0, 1].
    #[arg(long, default_value_t = 0.125)]
    learning_rate: f64,
    /// Desired response sharpness (Gaussian sigma, pixels).
    #[arg(long, default_value_t = 2.0)]
    sigma: f64,
    /// Denominator regularizer.
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Number of perturbed training patches accumulated at initialization.
    #[arg(long, default_value_t = 8)]
    augmentations: usize,
    /// Shadow detector window side, pixels.
    #[arg(long, default_value_t = 16)]
    detector_window: usize,
    /// Shadow detector threshold factor in (0, 1).
    #[arg(long, default_value_t = 0.85)]
    threshold_factor: f64,
    /// Area band that ends fusion mode.
    #[arg(long, default_value_t = 2.5)]
    recover_band: f64,
}

#[derive(Args)]
struct SynthArgs {
    /// Scenario preset: flat_easy, dark_crossing, textured, moving_distractor.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    preset: Option<Preset>,
    /// Scenario spec JSON file (as written by a previous synth run).
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Output directory for frames, gt.csv and spec.json.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Number of frames.
    #[arg(long)]
    frames: Option<usize>,
    /// Frame size as WxH, e.g. 640x360.
    #[arg(long, value_parser = parse_size, value_name = "WxH")]
    size: Option<(usize, usize)>,
    /// Generation seed; overrides the spec's.
    #[arg(long)]
    seed: Option<u64>,
    /// Frame encoding.
    #[arg(long, default_value = "png", value_parser = parse_format)]
    format: ImageFormat,
}

#[derive(Args)]
struct EvalArgs {
    /// Prediction CSV (frame,cx,cy,w,h,mode,peak,area).
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,
    /// Ground-truth CSV (frame,cx,cy,w,h).
    #[arg(long, value_name = "FILE")]
    gt: PathBuf,
    /// Restrict evaluation to the half-open frame window START:END.
    #[arg(long, value_parser = parse_window, value_name = "START:END")]
    window: Option<(usize, usize)>,
    /// Consecutive zero-IoU frames that flag a lost track.
    #[arg(long, default_value_t = eval::DEFAULT_LOST_THRESHOLD)]
    k: usize,
    /// Report JSON path; defaults to report.json beside the prediction CSV.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Optional per-frame IoU CSV for external plotting.
    #[arg(long, value_name = "FILE")]
    iou_csv: Option<PathBuf>,
}

#[derive(Args)]
struct MaskArgs {
    /// Directory holding frame_NNNNNN.png/.pgm files.
    #[arg(long = "in", value_name = "DIR")]
    input: PathBuf,
    /// Output directory for mask PGMs.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Write only the raw detection masks, skipping mask cleanup.
    #[arg(long)]
    raw: bool,
    /// Shadow detector window side, pixels.
    #[arg(long, default_value_t = 16)]
    detector_window: usize,
    /// Shadow detector threshold factor in (0, 1).
    #[arg(long, default_value_t = 0.85)]
    threshold_factor: f64,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) => m,
        }
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

/// Runs the CLI on the given arguments and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful runs.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Track(args) => cmd_track(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Mask(args) => cmd_mask(args),
    };
    match result {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            failure.code()
        }
    }
}

/// Everything a run resolved to, embedded in run.json so results can be
/// reproduced and post-processed.
#[derive(serde::Serialize, serde::Deserialize)]
struct RunMetadata {
    input: String,
    output: String,
    init: BoundingBox,
    config: TrackerConfig,
    frames: usize,
    seconds: f64,
    fps: f64,
}

fn cmd_track(args: TrackArgs) -> Result<(), Failure> {
    let config = TrackerConfig {
        padding_factor: args.padding,
        recover_band: args.recover_band,
        fusion_enabled: !args.no_fusion,
        detector: ShadowDetectorConfig {
            window: args.detector_window,
            threshold_factor: args.threshold_factor,
        },
        filter: FilterConfig {
            sigma: args.sigma,
            learning_rate: args.learning_rate,
            epsilon: args.epsilon,
            augmentations: args.augmentations,
            seed: args.seed,
        },
    };
    // Flag semantics are checked before any frame is touched.
    config
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    if args.init.w.round() < 4.0 || args.init.h.round() < 4.0 {
        return Err(Failure::Usage(format!(
            "initial box must be at least 4x4 pixels, got {}x{}",
            args.init.w, args.init.h
        )));
    }

    let frames = imaging::list_frames(&args.input)?;
    if frames.is_empty() {
        return Err(Failure::Data(format!(
            "no frame_NNNNNN.png/.pgm files in {}",
            args.input.display()
        )));
    }
    fs::create_dir_all(&args.out).map_err(|e| crate::Error::io(&args.out, e))?;

    let run = tracker::track_frames(frames.iter().map(imaging::load_frame), args.init, config)?;

    let predictions = args.out.join("predictions.csv");
    eval::write_predictions_csv(&predictions, &run.steps)?;

    let meta = RunMetadata {
        input: args.input.display().to_string(),
        output: args.out.display().to_string(),
        init: args.init,
        config,
        frames: run.steps.len(),
        seconds: run.seconds,
        fps: run.fps(),
    };
    let meta_path = args.out.join("run.json");
    fs::write(
        &meta_path,
        serde_json::to_string_pretty(&meta).map_err(crate::Error::from)?,
    )
    .map_err(|e| crate::Error::io(&meta_path, e))?;

    if args.overlay {
        for (path, step) in frames.iter().zip(&run.steps) {
            let mut frame = imaging::load_frame(path)?;
            burn_box(&mut frame, &step.bbox, step.mode == Mode::Fusion);
            let name = format!("overlay_{:06}.png", step.frame_index);
            imaging::save_frame(&frame, args.out.join(name), ImageFormat::Png)?;
        }
    }

    let fused_steps = run.steps.iter().filter(|s| s.mode == Mode::Fusion).count();
    println!(
        "tracked {} frames ({} fusion steps) at {:.1} frames/s -> {}",
        run.steps.len(),
        fused_steps,
        run.fps(),
        predictions.display()
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), Failure> {
    let mut spec: ScenarioSpec = match (&args.preset, &args.spec) {
        (Some(kind), None) => {
            let (w, h) = args.size.unwrap_or((640, 360));
            let frames = args.frames.unwrap_or(100);
            synth::preset_sized(*kind, w, h, frames)?
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| crate::Error::io(path, e))?;
            let mut spec: ScenarioSpec = serde_json::from_str(&text).map_err(crate::Error::from)?;
            if let Some((w, h)) = args.size {
                spec.width = w;
                spec.height = h;
            }
            if let Some(frames) = args.frames {
                spec.frames = frames;
            }
            spec
        }
        _ => unreachable!("clap enforces exactly one of --preset/--spec"),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    spec.validate()?;

    fs::create_dir_all(&args.out).map_err(|e| crate::Error::io(&args.out, e))?;
    for t in 0..spec.frames {
        let frame = synth::render_frame(&spec, t)?;
        let path = args.out.join(imaging::frame_filename(t, args.format));
        imaging::save_frame(&frame, path, args.format)?;
    }
    let gt = synth::ground_truth(&spec)?;
    eval::write_gt_csv(args.out.join("gt.csv"), &gt)?;
    let spec_path = args.out.join("spec.json");
    fs::write(
        &spec_path,
        serde_json::to_string_pretty(&spec).map_err(crate::Error::from)?,
    )
    .map_err(|e| crate::Error::io(&spec_path, e))?;

    println!(
        "wrote {} {}x{} frames + gt.csv + spec.json -> {}",
        spec.frames,
        spec.width,
        spec.height,
        args.out.display()
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let pred = eval::read_predictions_csv(&args.pred)?;
    let gt = eval::read_gt_csv(&args.gt)?;
    let mut report = eval::evaluate_window(&pred, &gt, args.k, args.window)?;

    // Pick up the measured throughput when the prediction came from a local
    // track run.
    if let Some(dir) = args.pred.parent() {
        let meta_path = dir.join("run.json");
        if let Ok(text) = fs::read_to_string(&meta_path) {
            if let Ok(meta) = serde_json::from_str::<RunMetadata>(&text) {
                report.fps = Some(meta.fps);
            }
        }
    }

    print!("{}", report.table());

    let report_path = args.report.unwrap_or_else(|| {
        args.pred
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join("report.json")
    });
    fs::write(
        &report_path,
        serde_json::to_string_pretty(&report).map_err(crate::Error::from)?,
    )
    .map_err(|e| crate::Error::io(&report_path, e))?;

    if let Some(iou_path) = &args.iou_csv {
        eval::write_iou_csv(iou_path, &report)?;
    }
    Ok(())
}

fn cmd_mask(args: MaskArgs) -> Result<(), Failure> {
    let cfg = ShadowDetectorConfig::new(args.detector_window, args.threshold_factor)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let frames = imaging::list_frames(&args.input)?;
    if frames.is_empty() {
        return Err(Failure::Data(format!(
            "no frame_NNNNNN.png/.pgm files in {}",
            args.input.display()
        )));
    }
    fs::create_dir_all(&args.out).map_err(|e| crate::Error::io(&args.out, e))?;

    for (idx, path) in frames.iter().enumerate() {
        let frame = imaging::load_frame(path)?;
        let raw = shadow::detect_shadows(&frame, &cfg);
        imaging::save_frame(
            &raw.to_frame(),
            args.out.join(format!("raw_{idx:06}.pgm")),
            ImageFormat::Pgm,
        )?;
        if !args.raw {
            let cleaned = shadow::clean_mask(&raw);
            imaging::save_frame(
                &cleaned.to_frame(),
                args.out.join(format!("clean_{idx:06}.pgm")),
                ImageFormat::Pgm,
            )?;
        }
    }
    println!(
        "wrote {} mask{} per frame for {} frames -> {}",
        if args.raw { 1 } else { 2 },
        if args.raw { "" } else { "s" },
        frames.len(),
        args.out.display()
    );
    Ok(())
}

/// Burns a box outline into a frame: a black outer line plus a white inner
/// line reads on any background; fusion steps use dashes instead of solid
/// lines.
fn burn_box(frame: &mut Frame, bbox: &BoundingBox, dashed: bool) {
    let (w, h) = (frame.width() as i64, frame.height() as i64);
    let mut draw_ring = |x0: i64, y0: i64, x1: i64, y1: i64, value: f64| {
        let mut put = |x: i64, y: i64, along: i64| {
            if x < 0 || y < 0 || x >= w || y >= h {
                return;
            }
            if dashed && (along / 4) % 2 == 1 {
                return;
            }
            frame.set(x as usize, y as usize, value);
        };
        for x in x0..=x1 {
            put(x, y0, x - x0);
            put(x, y1, x - x0);
        }
        for y in y0..=y1 {
            put(x0, y, y - y0);
            put(x1, y, y - y0);
        }
    };
    let r = bbox.pixel_extent();
    draw_ring(r.x0 - 1, r.y0 - 1, r.x1, r.y1, 0.0);
    draw_ring(r.x0, r.y0, r.x1 - 1, r.y1 - 1, 255.0);
}

fn parse_box(s: &str) -> Result<BoundingBox, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected CX,CY,W,H, found {s:?}"));
    }
    let mut vals = [0.0f64; 4];
    for (v, part) in vals.iter_mut().zip(&parts) {
        *v = part
            .trim()
            .parse()
            .map_err(|_| format!("cannot parse {part:?} as a number"))?;
    }
    BoundingBox::new(vals[0], vals[1], vals[2], vals[3]).map_err(|e| e.to_string())
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, found {s:?}"))?;
    let w = w.trim().parse().map_err(|_| format!("bad width {w:?}"))?;
    let h = h.trim().parse().map_err(|_| format!("bad height {h:?}"))?;
    if w == 0 || h == 0 {
        return Err("size must be positive".into());
    }
    Ok((w, h))
}

fn parse_window(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected START:END, found {s:?}"))?;
    let a = a.trim().parse().map_err(|_| format!("bad start {a:?}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad end {b:?}"))?;
    if a >= b {
        return Err(format!("window start {a} must precede end {b}"));
    }
    Ok((a, b))
}

fn parse_format(s: &str) -> Result<ImageFormat, String> {
    ImageFormat::from_extension(s).ok_or_else(|| format!("expected png or pgm, found {s:?}"))
}
