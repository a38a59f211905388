//! Evaluation workflow: IoU curves, lost-track detection, window restriction,
//! and the JSON report — comparing the fusion tracker against the plain
//! correlation baseline on the same sequence.
//!
//! ```bash
//! cargo run --example evaluate_predictions
//! ```

use shadowtrack::eval::{evaluate, evaluate_window, DEFAULT_LOST_THRESHOLD};
use shadowtrack::synth::{self, Preset};
use shadowtrack::tracker::{track_frames, TrackerConfig};

fn main() {
    let spec = synth::preset(Preset::DarkCrossing);
    let (frames, gt) = synth::generate(&spec).expect("scenario generates");

    for (label, fusion_enabled) in [("fusion", true), ("baseline", false)] {
        let config = TrackerConfig {
            fusion_enabled,
            ..TrackerConfig::default()
        };
        let run = track_frames(frames.iter().map(|f| Ok(f.clone())), gt.boxes[0], config)
            .expect("tracking runs");

        let mut report = evaluate(&run.steps, &gt, DEFAULT_LOST_THRESHOLD).expect("aligned");
        report.fps = Some(run.fps());

        println!("== {label} ==");
        print!("{}", report.table());

        // A focused window over the hard part of the sequence, like studying
        // the frames around a failure.
        let windowed = evaluate_window(&run.steps, &gt, DEFAULT_LOST_THRESHOLD, Some((40, 65)))
            .expect("window fits");
        println!(
            "frames 40..65 only: mean IoU {:.3}, lost {}",
            windowed.mean_iou, windowed.lost
        );

        println!(
            "report JSON:\n{}\n",
            serde_json::to_string_pretty(&report).expect("serializes")
        );
    }
}
