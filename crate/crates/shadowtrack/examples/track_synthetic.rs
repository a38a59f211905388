//! Minimal end-to-end tracking run, fully in memory: generate an easy
//! synthetic scenario, track the shadow from the first ground-truth box, and
//! print the per-frame results.
//!
//! ```bash
//! cargo run --example track_synthetic
//! ```

use shadowtrack::eval::{evaluate, iou, DEFAULT_LOST_THRESHOLD};
use shadowtrack::synth::{self, Preset};
use shadowtrack::tracker::{track_frames, TrackerConfig};

fn main() {
    let spec = synth::preset_sized(Preset::FlatEasy, 640, 360, 60).expect("preset is valid");
    let (frames, gt) = synth::generate(&spec).expect("scenario generates");

    let run = track_frames(
        frames.iter().map(|f| Ok(f.clone())),
        gt.boxes[0],
        TrackerConfig::default(),
    )
    .expect("tracking runs");

    println!(
        "{:>5}  {:>8} {:>8}  {:>6}  {:>7}  {:>6}",
        "frame", "cx", "cy", "mode", "area", "IoU"
    );
    for step in &run.steps {
        println!(
            "{:>5}  {:>8.2} {:>8.2}  {:>6}  {:>7.0}  {:>6.3}",
            step.frame_index,
            step.bbox.cx,
            step.bbox.cy,
            step.mode,
            step.shadow_area,
            iou(&step.bbox, &gt.boxes[step.frame_index]),
        );
    }

    let report = evaluate(&run.steps, &gt, DEFAULT_LOST_THRESHOLD).expect("aligned sequences");
    println!(
        "\nmean IoU {:.3} over {} frames, lost: {}, {:.1} frames/s",
        report.mean_iou,
        report.frames,
        report.lost,
        run.fps()
    );
}
