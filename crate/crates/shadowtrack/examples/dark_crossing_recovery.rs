//! The recovery story on one scenario: a drone shadow crosses a large
//! near-black rectangle. The plain correlation baseline latches onto the
//! rectangle and never comes back; with failure prediction and mask fusion
//! the tracker freezes its filter, searches a wider region, and re-acquires
//! the shadow on the far side.
//!
//! ```bash
//! cargo run --release --example dark_crossing_recovery
//! ```

use shadowtrack::eval::{evaluate, DEFAULT_LOST_THRESHOLD};
use shadowtrack::synth::{self, Preset};
use shadowtrack::tracker::{track_frames, Mode, TrackerConfig};

fn main() {
    let spec = synth::preset(Preset::DarkCrossing);
    let (frames, gt) = synth::generate(&spec).expect("preset generates");
    println!(
        "scenario: {}x{}, {} frames, target starts at ({}, {})",
        spec.width, spec.height, spec.frames, gt.boxes[0].cx, gt.boxes[0].cy
    );

    for (label, fusion) in [
        ("baseline (no fusion)", false),
        ("with shadow fusion", true),
    ] {
        let config = TrackerConfig {
            fusion_enabled: fusion,
            ..TrackerConfig::default()
        };
        let run = track_frames(frames.iter().map(|f| Ok(f.clone())), gt.boxes[0], config)
            .expect("tracking runs");

        // Where the tracker switched modes tells the story.
        let mut transitions = Vec::new();
        for pair in run.steps.windows(2) {
            if pair[0].mode != pair[1].mode {
                transitions.push(format!("{}@{}", pair[1].mode, pair[1].frame_index));
            }
        }

        let report = evaluate(&run.steps, &gt, DEFAULT_LOST_THRESHOLD).expect("aligned");
        println!("\n== {label} ==");
        println!("mean IoU {:.3}  lost {}", report.mean_iou, report.lost);
        println!(
            "mode transitions: {}",
            if transitions.is_empty() {
                "none".to_string()
            } else {
                transitions.join(", ")
            }
        );
        let fused = run.steps.iter().filter(|s| s.mode == Mode::Fusion).count();
        println!("fusion steps: {fused}/{}", run.steps.len());
        print!("per-frame IoU: ");
        for (i, v) in report.iou_series.iter().enumerate() {
            if i % 10 == 0 {
                print!(
                    "\n  {:3}..{:3} ",
                    i,
                    (i + 9).min(report.iou_series.len() - 1)
                );
            }
            print!("{}", symbol(*v));
        }
        println!();
    }
}

fn symbol(iou: f64) -> char {
    if iou == 0.0 {
        '.'
    } else if iou < 0.4 {
        '-'
    } else if iou < 0.7 {
        '+'
    } else {
        '#'
    }
}
