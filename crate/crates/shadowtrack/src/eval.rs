//! Quantitative evaluation: per-frame IoU curves, lost-track detection, and
//! the CSV/JSON formats shared with the CLI.
//!
//! Ground-truth CSV: header `frame,cx,cy,w,h`.
//! Prediction CSV:   header `frame,cx,cy,w,h,mode,peak,area`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::imaging::BoundingBox;
use crate::synth::GroundTruth;
use crate::tracker::{Mode, TrackStep};
use crate::{Error, Result};

/// Default number of consecutive zero-IoU frames that flags a lost track.
pub const DEFAULT_LOST_THRESHOLD: usize = 10;

/// Intersection over Union of two boxes on half-open extents; 0 when
/// disjoint, 1 for identical boxes.
///
/// Box areas are derived from the same extents as the intersection, so
/// `iou(a, a)` is exactly 1 even when `right − left` and `w` disagree in the
/// last bit.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (al, ar, at, ab) = (a.left(), a.right(), a.top(), a.bottom());
    let (bl, br, bt, bb) = (b.left(), b.right(), b.top(), b.bottom());
    let ix = ar.min(br) - al.max(bl);
    let iy = ab.min(bb) - at.max(bt);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    inter / ((ar - al) * (ab - at) + (br - bl) * (bb - bt) - inter)
}

/// Evaluation summary over a frame range.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EvalReport {
    /// Arithmetic mean IoU over the evaluated frames.
    pub mean_iou: f64,
    /// True when IoU was exactly zero for at least `lost_threshold`
    /// consecutive evaluated frames.
    pub lost: bool,
    pub lost_threshold: usize,
    /// Index of the first evaluated frame.
    pub first_frame: usize,
    pub frames: usize,
    /// Achieved tracking throughput, when the producer measured one.
    pub fps: Option<f64>,
    pub iou_series: Vec<f64>,
}

impl EvalReport {
    /// Plain-text summary table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<16} {}", "frames", self.frames);
        let _ = writeln!(out, "{:<16} {}", "first frame", self.first_frame);
        let _ = writeln!(out, "{:<16} {:.4}", "mean IoU", self.mean_iou);
        let _ = writeln!(
            out,
            "{:<16} {} (>= {} consecutive zero-IoU frames)",
            "lost", self.lost, self.lost_threshold
        );
        match self.fps {
            Some(fps) => {
                let _ = writeln!(out, "{:<16} {:.1}", "frames/s", fps);
            }
            None => {
                let _ = writeln!(out, "{:<16} n/a", "frames/s");
            }
        }
        out
    }
}

/// Evaluates predictions against ground truth over all frames.
pub fn evaluate(pred: &[TrackStep], gt: &GroundTruth, lost_threshold: usize) -> Result<EvalReport> {
    evaluate_window(pred, gt, lost_threshold, None)
}

/// Evaluates over a half-open frame window `[start, end)`; `None` means the
/// whole sequence. Prediction and ground truth must cover the same frame
/// indices.
pub fn evaluate_window(
    pred: &[TrackStep],
    gt: &GroundTruth,
    lost_threshold: usize,
    window: Option<(usize, usize)>,
) -> Result<EvalReport> {
    if pred.len() != gt.boxes.len() {
        return Err(Error::Eval(format!(
            "{} predictions vs {} ground-truth frames",
            pred.len(),
            gt.boxes.len()
        )));
    }
    for (i, step) in pred.iter().enumerate() {
        if step.frame_index != i {
            return Err(Error::Eval(format!(
                "prediction {} carries frame index {}",
                i, step.frame_index
            )));
        }
    }
    let (start, end) = match window {
        Some((a, b)) => (a, b.min(pred.len())),
        None => (0, pred.len()),
    };
    if start >= end {
        return Err(Error::Eval(format!(
            "window [{start}, {end}) selects no frames"
        )));
    }

    let series: Vec<f64> = (start..end)
        .map(|i| iou(&pred[i].bbox, &gt.boxes[i]))
        .collect();
    let mean = series.iter().sum::<f64>() / series.len() as f64;

    let mut run = 0usize;
    let mut longest_zero_run = 0usize;
    for &v in &series {
        if v == 0.0 {
            run += 1;
            longest_zero_run = longest_zero_run.max(run);
        } else {
            run = 0;
        }
    }

    Ok(EvalReport {
        mean_iou: mean,
        lost: lost_threshold > 0 && longest_zero_run >= lost_threshold,
        lost_threshold,
        first_frame: start,
        frames: series.len(),
        fps: None,
        iou_series: series,
    })
}

// --- CSV formats -----------------------------------------------------------

pub fn write_gt_csv(path: impl AsRef<Path>, gt: &GroundTruth) -> Result<()> {
    let mut out = String::from("frame,cx,cy,w,h\n");
    for (i, b) in gt.boxes.iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{},{}", i, b.cx, b.cy, b.w, b.h);
    }
    fs::write(path.as_ref(), out).map_err(|e| Error::io(path.as_ref(), e))
}

pub fn read_gt_csv(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut boxes = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            expect_header(line, "frame,cx,cy,w,h", path)?;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_fields(line, 5, path, lineno + 1)?;
        let frame: usize = parse_field(&fields[0], path, lineno + 1)?;
        if frame != boxes.len() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                reason: format!("expected frame {}, found {}", boxes.len(), frame),
            });
        }
        boxes.push(BoundingBox::new(
            parse_field(&fields[1], path, lineno + 1)?,
            parse_field(&fields[2], path, lineno + 1)?,
            parse_field(&fields[3], path, lineno + 1)?,
            parse_field(&fields[4], path, lineno + 1)?,
        )?);
    }
    Ok(GroundTruth {
        boxes,
        // True pixel areas are not part of the interchange format.
        areas: Vec::new(),
    })
}

pub fn write_predictions_csv(path: impl AsRef<Path>, steps: &[TrackStep]) -> Result<()> {
    let mut out = String::from("frame,cx,cy,w,h,mode,peak,area\n");
    for s in steps {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.frame_index, s.bbox.cx, s.bbox.cy, s.bbox.w, s.bbox.h, s.mode, s.peak, s.shadow_area
        );
    }
    fs::write(path.as_ref(), out).map_err(|e| Error::io(path.as_ref(), e))
}

pub fn read_predictions_csv(path: impl AsRef<Path>) -> Result<Vec<TrackStep>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut steps: Vec<TrackStep> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            expect_header(line, "frame,cx,cy,w,h,mode,peak,area", path)?;
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_fields(line, 8, path, lineno + 1)?;
        let mode: Mode = fields[5].parse().map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            reason: e,
        })?;
        steps.push(TrackStep {
            frame_index: parse_field(&fields[0], path, lineno + 1)?,
            bbox: BoundingBox::new(
                parse_field(&fields[1], path, lineno + 1)?,
                parse_field(&fields[2], path, lineno + 1)?,
                parse_field(&fields[3], path, lineno + 1)?,
                parse_field(&fields[4], path, lineno + 1)?,
            )?,
            mode,
            peak: parse_field(&fields[6], path, lineno + 1)?,
            shadow_area: parse_field(&fields[7], path, lineno + 1)?,
        });
    }
    Ok(steps)
}

/// Optional per-frame IoU dump for external plotting: header `frame,iou`.
pub fn write_iou_csv(path: impl AsRef<Path>, report: &EvalReport) -> Result<()> {
    let mut out = String::from("frame,iou\n");
    for (offset, v) in report.iou_series.iter().enumerate() {
        let _ = writeln!(out, "{},{}", report.first_frame + offset, v);
    }
    fs::write(path.as_ref(), out).map_err(|e| Error::io(path.as_ref(), e))
}

fn expect_header(line: &str, expected: &str, path: &Path) -> Result<()> {
    if line.trim() == expected {
        Ok(())
    } else {
        Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected header {expected:?}, found {:?}", line.trim()),
        })
    }
}

fn split_fields(line: &str, n: usize, path: &Path, lineno: usize) -> Result<Vec<String>> {
    let fields: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
    if fields.len() != n {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: lineno,
            reason: format!("expected {n} fields, found {}", fields.len()),
        });
    }
    Ok(fields)
}

fn parse_field<T: std::str::FromStr>(field: &str, path: &Path, lineno: usize) -> Result<T> {
    field.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line: lineno,
        reason: format!("cannot parse {field:?}"),
    })
}
