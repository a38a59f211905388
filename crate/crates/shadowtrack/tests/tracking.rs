//! Behavioral invariants of the tracking state machine on the crossing
//! scenario, driven step by step so internal state can be checked.

use shadowtrack::corr::CorrelationFilter;
use shadowtrack::eval::{evaluate, iou, DEFAULT_LOST_THRESHOLD};
use shadowtrack::shadow::{clean_mask, detect_shadows};
use shadowtrack::synth::{self, Preset};
use shadowtrack::tracker::{track_frames, Mode, TrackerConfig, TrackerState};

#[test]
fn crossing_transitions_and_recovers() {
    let spec = synth::preset(Preset::DarkCrossing);
    let (frames, gt) = synth::generate(&spec).unwrap();
    let run = track_frames(
        frames.iter().map(|f| Ok(f.clone())),
        gt.boxes[0],
        TrackerConfig::default(),
    )
    .unwrap();

    let modes: Vec<Mode> = run.steps.iter().map(|s| s.mode).collect();
    let first_fusion = modes.iter().position(|&m| m == Mode::Fusion);
    let last_fusion = modes.iter().rposition(|&m| m == Mode::Fusion);
    let (first_fusion, last_fusion) = (
        first_fusion.expect("the crossing must trigger fusion"),
        last_fusion.unwrap(),
    );
    assert!(
        modes[last_fusion + 1..].iter().all(|&m| m == Mode::Normal),
        "tracking must return to normal mode after the crossing"
    );
    assert!(
        first_fusion > 5,
        "fusion must not trigger on the easy approach"
    );

    // After recovery the box must stay on the target: strictly positive IoU
    // on every post-fusion frame.
    for (i, step) in run.steps.iter().enumerate().skip(last_fusion + 1) {
        assert!(
            iou(&step.bbox, &gt.boxes[i]) > 0.0,
            "lost the target at frame {i} after recovery"
        );
    }

    let report = evaluate(&run.steps, &gt, DEFAULT_LOST_THRESHOLD).unwrap();
    assert!(!report.lost);
}

#[test]
fn fusion_freezes_the_kernel_and_lands_on_mask_pixels() {
    let spec = synth::preset(Preset::DarkCrossing);
    let (frames, gt) = synth::generate(&spec).unwrap();
    let config = TrackerConfig::default();

    let mut state = TrackerState::init(&frames[0], gt.boxes[0], config).unwrap();
    // Filter that produced the most recent accepted normal-mode step.
    let mut last_accepted_filter: CorrelationFilter = state.filter().clone();
    let mut frozen: Option<CorrelationFilter> = None;
    let mut fusion_steps = 0usize;

    for frame in &frames[1..] {
        let before = state.filter().clone();
        let prev_bbox = state.bbox();
        let (next, step) = state.step(frame).unwrap();

        match step.mode {
            Mode::Normal => {
                last_accepted_filter = before;
                frozen = None;
            }
            Mode::Fusion => {
                fusion_steps += 1;
                // The frozen kernel is exactly the filter from the last
                // correctly tracked frame, bit for bit, across the whole
                // fusion run.
                let reference = frozen.get_or_insert_with(|| last_accepted_filter.clone());
                assert_eq!(
                    next.last_good_filter(),
                    reference,
                    "frozen kernel changed during fusion at frame {}",
                    step.frame_index
                );

                // The fused argmax can only land on a shadow-mask pixel;
                // with no shadow evidence the previous center is held.
                let held = step.bbox == prev_bbox;
                if !held {
                    let mask = clean_mask(&detect_shadows(frame, &config.detector));
                    let (cx, cy) = (step.bbox.cx as i64, step.bbox.cy as i64);
                    assert!(
                        mask.get_or_false(cx, cy),
                        "fusion center ({cx},{cy}) off the shadow mask at frame {}",
                        step.frame_index
                    );
                }
                if next.mode() == Mode::Normal {
                    frozen = None;
                }
            }
        }
        state = next;
    }
    assert!(fusion_steps > 0, "scenario must exercise fusion");
}

#[test]
fn identical_runs_emit_identical_step_streams() {
    let spec = synth::preset_sized(Preset::MovingDistractor, 320, 180, 40).unwrap();
    let (frames, gt) = synth::generate(&spec).unwrap();
    let config = TrackerConfig::default();

    let a = track_frames(frames.iter().map(|f| Ok(f.clone())), gt.boxes[0], config).unwrap();
    let b = track_frames(frames.iter().map(|f| Ok(f.clone())), gt.boxes[0], config).unwrap();
    assert_eq!(a.steps, b.steps);
}

#[test]
fn baseline_arm_never_fuses() {
    let spec = synth::preset_sized(Preset::DarkCrossing, 320, 180, 40).unwrap();
    let (frames, gt) = synth::generate(&spec).unwrap();
    let config = TrackerConfig {
        fusion_enabled: false,
        ..TrackerConfig::default()
    };
    let run = track_frames(frames.iter().map(|f| Ok(f.clone())), gt.boxes[0], config).unwrap();
    assert!(run.steps.iter().all(|s| s.mode == Mode::Normal));
}
