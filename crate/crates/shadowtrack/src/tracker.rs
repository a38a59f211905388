//! The per-frame tracking state machine.
//!
//! Normal mode runs plain correlation tracking: correlate the live filter
//! over a padded search region, move the box to the response peak, update the
//! filter. Every accepted frame also measures the tracked shadow's area — the
//! pixel count of the cleaned-mask component nearest the box center. A sudden
//! area blow-up (current ≥ 2.5 × previous) predicts that the tracker latched
//! onto something else; the frame is re-processed in fusion mode: the search
//! region grows by a third per dimension, the filter is frozen to the one
//! from the last correctly-tracked frame, and the response is multiplied
//! pixel-wise with the shadow mask so that only shadow locations can win.
//! Fusion persists until the measured area returns to a band around the last
//! good area, then normal tracking resumes.

use std::fmt;
use std::time::Instant;

use crate::corr::{even_up, CorrelationFilter, CorrelationMap, FilterConfig};
use crate::imaging::{
    connected_components, extract_patch, BinaryMask, BoundingBox, Component, Frame,
};
use crate::shadow::{clean_mask, detect_shadows, ShadowDetectorConfig};
use crate::{Error, Result};

/// Which tracking path produced a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Mode {
    Normal,
    Fusion,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Normal => write!(f, "normal"),
            Mode::Fusion => write!(f, "fusion"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "normal" => Ok(Mode::Normal),
            "fusion" => Ok(Mode::Fusion),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// Tracker parameters. The fusion expansion factor and the failure area
/// ratio are fixed constants of the method; everything else is tunable.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrackerConfig {
    /// Search region scale over the target box in normal mode.
    pub padding_factor: f64,
    /// Symmetric area band that ends fusion mode: recovered when
    /// `area < recover_band × last_good` and `last_good < recover_band × area`.
    pub recover_band: f64,
    /// When false, failure prediction and fusion are disabled entirely and
    /// the tracker runs as a plain correlation-filter baseline.
    pub fusion_enabled: bool,
    pub detector: ShadowDetectorConfig,
    pub filter: FilterConfig,
}

impl TrackerConfig {
    /// Per-dimension search enlargement applied in fusion mode.
    pub const FUSION_EXPAND: f64 = 4.0 / 3.0;
    /// Area growth ratio that predicts tracking failure.
    pub const AREA_RATIO_THRESHOLD: f64 = 2.5;

    pub fn validate(&self) -> Result<()> {
        if !self.padding_factor.is_finite() || self.padding_factor < 1.0 {
            return Err(Error::Config(format!(
                "padding factor must be >= 1, got {}",
                self.padding_factor
            )));
        }
        if !self.recover_band.is_finite() || self.recover_band <= 1.0 {
            return Err(Error::Config(format!(
                "recover band must exceed 1, got {}",
                self.recover_band
            )));
        }
        ShadowDetectorConfig::new(self.detector.window, self.detector.threshold_factor)?;
        self.filter.validate()
    }
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            padding_factor: 2.0,
            recover_band: 2.5,
            fusion_enabled: true,
            detector: ShadowDetectorConfig::default(),
            filter: FilterConfig::default(),
        }
    }
}

/// One emitted tracking result.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackStep {
    pub frame_index: usize,
    pub bbox: BoundingBox,
    pub mode: Mode,
    /// Maximum of the (fused, in fusion mode) response map.
    pub peak: f64,
    /// Pixel area of the shadow component nearest the box center.
    pub shadow_area: f64,
}

/// True when the shadow area grew enough between consecutive frames to
/// predict a tracking failure. A zero previous area gives no basis for a
/// ratio and never triggers.
pub fn predict_failure(prev_area: f64, curr_area: f64) -> bool {
    prev_area > 0.0 && curr_area >= TrackerConfig::AREA_RATIO_THRESHOLD * prev_area
}

/// Grows a region by a third per dimension about its center, rounding
/// dimensions up to whole pixels.
pub fn expand_region(region: &BoundingBox) -> BoundingBox {
    BoundingBox {
        cx: region.cx,
        cy: region.cy,
        w: (TrackerConfig::FUSION_EXPAND * region.w).ceil(),
        h: (TrackerConfig::FUSION_EXPAND * region.h).ceil(),
    }
}

/// Area of the component whose centroid lies closest to `center`; ties go to
/// the larger component, and no components at all yield zero.
pub fn nearest_component_area(components: &[Component], center: (f64, f64)) -> f64 {
    let mut best: Option<(f64, usize)> = None;
    for c in components {
        let d2 = (c.centroid.0 - center.0).powi(2) + (c.centroid.1 - center.1).powi(2);
        let better = match best {
            None => true,
            Some((bd, bc)) => d2 < bd || (d2 == bd && c.pixel_count > bc),
        };
        if better {
            best = Some((d2, c.pixel_count));
        }
    }
    best.map(|(_, count)| count as f64).unwrap_or(0.0)
}

/// Detects and cleans shadows on the whole frame, then measures the
/// component nearest the box center. The tracker's per-frame area estimate.
pub fn shadow_area_at(frame: &Frame, bbox: &BoundingBox, cfg: &ShadowDetectorConfig) -> f64 {
    let mask = clean_mask(&detect_shadows(frame, cfg));
    let components = connected_components(&mask);
    nearest_component_area(&components, (bbox.cx, bbox.cy))
}

/// Pixel-wise product of the minimum-shifted response with the shadow mask:
/// `fused = (response − min(response)) ⊙ mask`, with the mask sampled at the
/// map's frame-coordinate extent (outside the frame counts as background).
/// Shifting first makes the scores nonnegative, so masked-out locations can
/// never outrank a shadow location with positive shifted response.
pub fn fuse_with_mask(map: &CorrelationMap, mask: &BinaryMask) -> Vec<f64> {
    let min = map.min_value();
    let mut fused = Vec::with_capacity(map.data().len());
    for y in 0..map.height() {
        for x in 0..map.width() {
            let fx = map.origin.0 + x as i64;
            let fy = map.origin.1 + y as i64;
            let score = if mask.get_or_false(fx, fy) {
                map.data()[y * map.width() + x] - min
            } else {
                0.0
            };
            fused.push(score);
        }
    }
    fused
}

/// Full tracker state between frames.
#[derive(Debug, Clone)]
pub struct TrackerState {
    config: TrackerConfig,
    frame_width: usize,
    frame_height: usize,
    mode: Mode,
    bbox: BoundingBox,
    /// Live filter; updated after every accepted normal-mode step.
    filter: CorrelationFilter,
    /// Filter that produced the last accepted normal-mode localization;
    /// frozen and used for correlation while in fusion mode.
    last_good_filter: CorrelationFilter,
    last_good_area: f64,
    prev_area: f64,
    frame_index: usize,
}

impl TrackerState {
    /// Initializes tracking from a user-provided box on the first frame.
    pub fn init(frame: &Frame, user_box: BoundingBox, config: TrackerConfig) -> Result<Self> {
        config.validate()?;
        if user_box.w.round() < 4.0 || user_box.h.round() < 4.0 {
            return Err(Error::Geometry(format!(
                "initial box must be at least 4x4 pixels, got {}x{}",
                user_box.w, user_box.h
            )));
        }
        if !user_box.inside(frame.width(), frame.height()) {
            return Err(Error::Geometry(format!(
                "initial box [{}, {}) x [{}, {}) extends outside the {}x{} frame",
                user_box.left(),
                user_box.right(),
                user_box.top(),
                user_box.bottom(),
                frame.width(),
                frame.height()
            )));
        }
        let filter =
            CorrelationFilter::init(frame, &user_box, config.padding_factor, &config.filter)?;
        let prev_area = shadow_area_at(frame, &user_box, &config.detector);
        Ok(TrackerState {
            frame_width: frame.width(),
            frame_height: frame.height(),
            mode: Mode::Normal,
            bbox: user_box,
            last_good_filter: filter.clone(),
            filter,
            last_good_area: prev_area,
            prev_area,
            frame_index: 0,
            config,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn frame_index(&self) -> usize {
        self.frame_index
    }

    pub fn prev_area(&self) -> f64 {
        self.prev_area
    }

    pub fn last_good_area(&self) -> f64 {
        self.last_good_area
    }

    pub fn filter(&self) -> &CorrelationFilter {
        &self.filter
    }

    pub fn last_good_filter(&self) -> &CorrelationFilter {
        &self.last_good_filter
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    /// Processes the next frame, returning the advanced state and the emitted
    /// step. In normal mode a predicted failure discards the correlation
    /// result and re-processes this same frame in fusion mode.
    pub fn step(self, frame: &Frame) -> Result<(Self, TrackStep)> {
        if (frame.width(), frame.height()) != (self.frame_width, self.frame_height) {
            return Err(Error::DimensionMismatch(format!(
                "frame is {}x{}, sequence started at {}x{}",
                frame.width(),
                frame.height(),
                self.frame_width,
                self.frame_height
            )));
        }
        // One shadow pass per frame serves the failure check and the fusion
        // mask alike.
        let mask = clean_mask(&detect_shadows(frame, &self.config.detector));
        let components = connected_components(&mask);

        match self.mode {
            Mode::Normal => self.step_normal(frame, &mask, &components),
            Mode::Fusion => self.step_fusion(frame, &mask, &components),
        }
    }

    fn step_normal(
        mut self,
        frame: &Frame,
        mask: &BinaryMask,
        components: &[Component],
    ) -> Result<(Self, TrackStep)> {
        let search = BoundingBox::new(
            self.bbox.cx,
            self.bbox.cy,
            self.filter.width() as f64,
            self.filter.height() as f64,
        )?;
        let patch = extract_patch(frame, &search);
        let extent = search.pixel_extent();
        let mut map = self.filter.correlate(&patch)?;
        map.origin = (extent.x0, extent.y0);

        let (ax, ay) = map.argmax();
        let peak = map.data()[ay * map.width() + ax];
        let cx = ((extent.x0 + ax as i64) as f64).clamp(0.0, self.frame_width as f64);
        let cy = ((extent.y0 + ay as i64) as f64).clamp(0.0, self.frame_height as f64);
        let candidate = BoundingBox::new(cx, cy, self.bbox.w, self.bbox.h)?;

        let curr_area = nearest_component_area(components, (candidate.cx, candidate.cy));
        if self.config.fusion_enabled && predict_failure(self.prev_area, curr_area) {
            // Discard this localization and recover on the same frame.
            self.mode = Mode::Fusion;
            return self.step_fusion(frame, mask, components);
        }

        let used = self.filter.clone();
        let updated = self.filter.updated(&patch, (ax, ay))?;
        let step = TrackStep {
            frame_index: self.frame_index + 1,
            bbox: candidate,
            mode: Mode::Normal,
            peak,
            shadow_area: curr_area,
        };
        let next = TrackerState {
            bbox: candidate,
            filter: updated,
            last_good_filter: used,
            last_good_area: curr_area,
            prev_area: curr_area,
            frame_index: self.frame_index + 1,
            ..self
        };
        Ok((next, step))
    }

    fn step_fusion(
        self,
        frame: &Frame,
        mask: &BinaryMask,
        components: &[Component],
    ) -> Result<(Self, TrackStep)> {
        let search = BoundingBox::new(
            self.bbox.cx,
            self.bbox.cy,
            self.last_good_filter.width() as f64,
            self.last_good_filter.height() as f64,
        )?;
        let expanded = expand_region(&search);
        let patch_box = BoundingBox::new(
            expanded.cx,
            expanded.cy,
            even_up(expanded.w as usize) as f64,
            even_up(expanded.h as usize) as f64,
        )?;
        let patch = extract_patch(frame, &patch_box);
        let extent = patch_box.pixel_extent();

        // Frozen kernel: correlate with the filter from the last correctly
        // tracked frame; the live filter is not touched here.
        let mut map = self.last_good_filter.correlate(&patch)?;
        map.origin = (extent.x0, extent.y0);

        let fused = fuse_with_mask(&map, mask);
        let mut best = 0usize;
        let mut best_score = fused[0];
        for (i, &v) in fused.iter().enumerate().skip(1) {
            if v > best_score {
                best_score = v;
                best = i;
            }
        }

        let bbox = if best_score > 0.0 {
            let ax = (best % map.width()) as i64;
            let ay = (best / map.width()) as i64;
            BoundingBox::new(
                (extent.x0 + ax) as f64,
                (extent.y0 + ay) as f64,
                self.bbox.w,
                self.bbox.h,
            )?
        } else {
            // No shadow evidence inside the enlarged region: hold position.
            self.bbox
        };
        let peak = if best_score > 0.0 { best_score } else { 0.0 };

        let curr_area = nearest_component_area(components, (bbox.cx, bbox.cy));
        let band = self.config.recover_band;
        let recovered =
            curr_area < band * self.last_good_area && self.last_good_area < band * curr_area;

        let step = TrackStep {
            frame_index: self.frame_index + 1,
            bbox,
            mode: Mode::Fusion,
            peak,
            shadow_area: curr_area,
        };
        let next = TrackerState {
            mode: if recovered {
                Mode::Normal
            } else {
                Mode::Fusion
            },
            bbox,
            filter: if recovered {
                self.last_good_filter.clone()
            } else {
                self.filter
            },
            prev_area: curr_area,
            frame_index: self.frame_index + 1,
            ..self
        };
        Ok((next, step))
    }
}

/// A tracked sequence plus the wall-clock time the loop took.
#[derive(Debug, Clone)]
pub struct TrackRun {
    pub steps: Vec<TrackStep>,
    pub seconds: f64,
}

impl TrackRun {
    /// Achieved throughput over the stepped frames (the init frame costs are
    /// included in the elapsed time).
    pub fn fps(&self) -> f64 {
        if self.seconds > 0.0 {
            (self.steps.len().saturating_sub(1)) as f64 / self.seconds
        } else {
            f64::INFINITY
        }
    }
}

/// Drives a whole sequence: initializes on the first frame (emitting the
/// initial box as step 0) and steps through the rest.
pub fn track_frames<I>(
    mut frames: I,
    init_box: BoundingBox,
    config: TrackerConfig,
) -> Result<TrackRun>
where
    I: Iterator<Item = Result<Frame>>,
{
    let first = frames
        .next()
        .ok_or_else(|| Error::Scenario("sequence contains no frames".into()))??;
    let start = Instant::now();
    let mut state = TrackerState::init(&first, init_box, config)?;
    let mut steps = vec![TrackStep {
        frame_index: 0,
        bbox: init_box,
        mode: Mode::Normal,
        peak: 0.0,
        shadow_area: state.prev_area(),
    }];
    for frame in frames {
        let (next, step) = state.step(&frame?)?;
        steps.push(step);
        state = next;
    }
    Ok(TrackRun {
        steps,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::BoundingBox;

    #[test]
    fn failure_threshold_is_inclusive() {
        assert!(predict_failure(100.0, 250.0));
        assert!(!predict_failure(100.0, 249.0));
        assert!(!predict_failure(0.0, 500.0));
        assert!(predict_failure(1.0, 2.5));
    }

    #[test]
    fn expansion_matches_four_thirds_area_on_divisible_dims() {
        let region = BoundingBox::new(100.0, 50.0, 60.0, 60.0).unwrap();
        let expanded = expand_region(&region);
        assert_eq!((expanded.w, expanded.h), (80.0, 80.0));
        assert_eq!(expanded.area() / region.area(), 16.0 / 9.0);
        assert_eq!((expanded.cx, expanded.cy), (100.0, 50.0));
    }

    #[test]
    fn expansion_rounds_up() {
        let region = BoundingBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let expanded = expand_region(&region);
        assert_eq!((expanded.w, expanded.h), (2.0, 2.0));
    }

    #[test]
    fn nearest_component_breaks_ties_by_area() {
        let comp = |cx: f64, cy: f64, count: usize| Component {
            pixel_count: count,
            centroid: (cx, cy),
            bbox: BoundingBox::new(cx, cy, 4.0, 4.0).unwrap(),
        };
        let comps = vec![comp(10.0, 10.0, 40), comp(30.0, 10.0, 90)];
        // Query point equidistant from both centroids.
        assert_eq!(nearest_component_area(&comps, (20.0, 10.0)), 90.0);
        // Clearly nearer the small one.
        assert_eq!(nearest_component_area(&comps, (12.0, 10.0)), 40.0);
        assert_eq!(nearest_component_area(&[], (0.0, 0.0)), 0.0);
    }

    /// Bright frame with a hard-edged dark ellipse.
    fn ellipse_frame(
        w: usize,
        h: usize,
        center: (f64, f64),
        semi: (f64, f64),
        attenuation: f64,
    ) -> Frame {
        let mut f = Frame::filled(w, h, 200.0).unwrap();
        for y in 0..h {
            for x in 0..w {
                let nx = (x as f64 + 0.5 - center.0) / semi.0;
                let ny = (y as f64 + 0.5 - center.1) / semi.1;
                if nx * nx + ny * ny < 1.0 {
                    f.set(x, y, 200.0 * attenuation);
                }
            }
        }
        f
    }

    #[test]
    fn shadow_area_matches_blob_under_center() {
        let frame = ellipse_frame(120, 90, (60.0, 45.0), (10.0, 6.0), 0.35);
        let bbox = BoundingBox::new(60.0, 45.0, 24.0, 16.0).unwrap();
        let area = shadow_area_at(&frame, &bbox, &ShadowDetectorConfig::default());
        let true_area = std::f64::consts::PI * 10.0 * 6.0;
        assert!(
            (area - true_area).abs() / true_area < 0.2,
            "detected {area}, geometric {true_area}"
        );
    }

    #[test]
    fn bright_frame_has_zero_shadow_area() {
        let frame = Frame::filled(64, 64, 220.0).unwrap();
        let bbox = BoundingBox::new(32.0, 32.0, 10.0, 10.0).unwrap();
        assert_eq!(
            shadow_area_at(&frame, &bbox, &ShadowDetectorConfig::default()),
            0.0
        );
    }

    #[test]
    fn init_measures_target_area_and_starts_normal() {
        let frame = ellipse_frame(160, 120, (80.0, 60.0), (10.0, 6.0), 0.35);
        let bbox = BoundingBox::new(80.0, 60.0, 24.0, 16.0).unwrap();
        let state = TrackerState::init(&frame, bbox, TrackerConfig::default()).unwrap();
        assert_eq!(state.mode(), Mode::Normal);
        let true_area = std::f64::consts::PI * 10.0 * 6.0;
        assert!((state.prev_area() - true_area).abs() / true_area < 0.2);
        assert_eq!(state.frame_index(), 0);
    }

    #[test]
    fn init_rejects_box_leaving_frame() {
        let frame = Frame::filled(64, 64, 200.0).unwrap();
        let bbox = BoundingBox::new(2.0, 32.0, 10.0, 10.0).unwrap();
        assert!(TrackerState::init(&frame, bbox, TrackerConfig::default()).is_err());
    }

    #[test]
    fn step_rejects_dimension_change() {
        let frame = ellipse_frame(120, 90, (60.0, 45.0), (10.0, 6.0), 0.35);
        let bbox = BoundingBox::new(60.0, 45.0, 24.0, 16.0).unwrap();
        let state = TrackerState::init(&frame, bbox, TrackerConfig::default()).unwrap();
        let other = Frame::filled(60, 45, 100.0).unwrap();
        assert!(state.step(&other).is_err());
    }

    #[test]
    fn static_target_stays_put_for_thirty_steps() {
        let frame = ellipse_frame(160, 120, (80.0, 60.0), (10.0, 6.0), 0.35);
        let bbox = BoundingBox::new(80.0, 60.0, 24.0, 16.0).unwrap();
        let mut state = TrackerState::init(&frame, bbox, TrackerConfig::default()).unwrap();
        for _ in 0..30 {
            let (next, step) = state.step(&frame).unwrap();
            assert_eq!(step.mode, Mode::Normal);
            state = next;
        }
        let drift = ((state.bbox().cx - 80.0).powi(2) + (state.bbox().cy - 60.0).powi(2)).sqrt();
        assert!(drift < 2.0, "drifted {drift} px on a static scene");
    }

    #[test]
    fn fused_scores_zero_outside_mask() {
        let mut mask = BinaryMask::empty(10, 10).unwrap();
        mask.set(4, 4, true);
        mask.set(5, 4, true);

        let data: Vec<f64> = (0..100).map(|i| (i as f64) * 0.01 - 0.3).collect();
        let map = CorrelationMap::from_parts(10, 10, data, (0, 0)).unwrap();
        let fused = fuse_with_mask(&map, &mask);

        for y in 0..10 {
            for x in 0..10 {
                let v = fused[y * 10 + x];
                if mask.get(x, y) {
                    assert!(v >= 0.0);
                } else {
                    assert_eq!(v, 0.0, "unmasked pixel ({x},{y}) must score zero");
                }
            }
        }
        // The best masked pixel wins over every unmasked one.
        let best = fused.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(best > 0.0);
        assert_eq!(fused[4 * 10 + 5], best);
    }

    #[test]
    fn map_scaling_keeps_argmax() {
        let data: Vec<f64> = (0..64)
            .map(|i| ((i * 37) % 64) as f64 / 64.0 - 0.5)
            .collect();
        let map = CorrelationMap::from_parts(8, 8, data.clone(), (0, 0)).unwrap();
        for k in [0.25, 3.0, 1e6] {
            let scaled: Vec<f64> = data.iter().map(|&v| v * k).collect();
            let scaled_map = CorrelationMap::from_parts(8, 8, scaled, (0, 0)).unwrap();
            assert_eq!(scaled_map.argmax(), map.argmax(), "scale {k}");
        }
    }
}
