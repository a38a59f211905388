//! Shadow-aware correlation-filter tracking for aerial image sequences.
//!
//! Small dark targets such as a drone's shadow are hard to follow with plain
//! template trackers: they are blurry, nearly featureless, and vanish over
//! dark ground. This crate combines a frequency-domain correlation tracker
//! with a physical cue — an adaptive-threshold shadow mask — to predict
//! tracking failure and recover from it:
//!
//! * [`imaging`] — frames, integral images, binary morphology, connected
//!   components, patch extraction, PNG/PGM sequence I/O.
//! * [`shadow`] — adaptive-threshold shadow detection and mask cleanup.
//! * [`corr`] — closed-form correlation filters: training, response maps,
//!   online updates.
//! * [`tracker`] — the per-frame state machine: normal correlation tracking,
//!   area-ratio failure prediction, and mask-fused recovery over an enlarged
//!   search region with a frozen filter.
//! * [`synth`] — deterministic synthetic scenario generator with per-frame
//!   ground truth, used for testing and benchmarking.
//! * [`eval`] — IoU curves, lost-track detection, report serialization, and
//!   the CSV formats shared with the CLI.
//! * [`cli`] — the `track | synth | eval | mask` command-line front end.
//!
//! The `examples/` directory contains one runnable program per capability;
//! start with `track_synthetic`:
//!
//! ```bash
//! cargo run --example track_synthetic
//! ```
//!
//! # Quick tour
//!
//! ```
//! use shadowtrack::imaging::BoundingBox;
//! use shadowtrack::synth::{self, Preset};
//! use shadowtrack::tracker::{TrackerConfig, TrackerState};
//!
//! let spec = synth::preset_sized(Preset::FlatEasy, 320, 180, 12).unwrap();
//! let (frames, gt) = synth::generate(&spec).unwrap();
//!
//! let mut state = TrackerState::init(&frames[0], gt.boxes[0], TrackerConfig::default()).unwrap();
//! for frame in &frames[1..] {
//!     let (next, step) = state.step(frame).unwrap();
//!     state = next;
//!     assert!(step.bbox.cx >= 0.0);
//! }
//! ```

pub mod cli;
pub mod corr;
mod error;
pub mod eval;
pub mod imaging;
pub mod shadow;
pub mod synth;
pub mod tracker;

pub use error::{Error, Result};
