//! Deterministic synthetic aerial-shadow sequences with per-frame ground
//! truth.
//!
//! Shadows are rendered multiplicatively — intensity × attenuation inside the
//! occluder support — because real shadows scale with surface albedo, which
//! is exactly why relative (adaptive) thresholding can find them. Occluder
//! boundaries get a Gaussian-blurred penumbra. Every sample is a pure
//! function of the spec and seed, so frames can be rendered in any order and
//! repeated runs are bitwise identical.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::imaging::{BoundingBox, Frame};
use crate::{Error, Result};

/// Scene background texture.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Background {
    Flat {
        level: f64,
    },
    /// Static per-pixel uniform noise in `level ± amplitude`.
    Noise {
        level: f64,
        amplitude: f64,
    },
    /// Checkerboard of `tile`-sized squares.
    Tiles {
        light: f64,
        dark: f64,
        tile: usize,
    },
}

/// Occluder footprint.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// Semi-axes in pixels.
    Ellipse { rx: f64, ry: f64 },
    /// Full side lengths in pixels.
    Rect { w: f64, h: f64 },
}

impl Shape {
    /// Signed distance to the shape boundary at center offset `(dx, dy)`;
    /// negative inside.
    fn signed_distance(&self, dx: f64, dy: f64) -> f64 {
        match *self {
            Shape::Ellipse { rx, ry } => {
                let q = ((dx / rx).powi(2) + (dy / ry).powi(2)).sqrt();
                (q - 1.0) * rx.min(ry)
            }
            Shape::Rect { w, h } => {
                let ox = dx.abs() - w / 2.0;
                let oy = dy.abs() - h / 2.0;
                let outside = (ox.max(0.0).powi(2) + oy.max(0.0).powi(2)).sqrt();
                outside + ox.max(oy).min(0.0)
            }
        }
    }

    /// Half extents of the support (ignoring blur).
    fn half_extent(&self) -> (f64, f64) {
        match *self {
            Shape::Ellipse { rx, ry } => (rx, ry),
            Shape::Rect { w, h } => (w / 2.0, h / 2.0),
        }
    }
}

/// Path waypoint in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
}

/// A dark occluder moving along a waypoint polyline (one waypoint = static).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Occluder {
    pub shape: Shape,
    /// Intensity multiplier inside the support, in `(0, 1)`.
    pub attenuation: f64,
    /// Penumbra width (Gaussian sigma, pixels); 0 renders a hard edge.
    pub blur_sigma: f64,
    pub path: Vec<Waypoint>,
}

impl Occluder {
    /// Position at frame `t` of `frames`: linear interpolation along the
    /// waypoint polyline, uniform in time per segment.
    pub fn position(&self, frame: usize, frames: usize) -> (f64, f64) {
        let n = self.path.len();
        if n == 1 || frames <= 1 {
            return (self.path[0].x, self.path[0].y);
        }
        let u = frame as f64 / (frames - 1) as f64;
        let s = u * (n - 1) as f64;
        let i = (s.floor() as usize).min(n - 2);
        let local = s - i as f64;
        let (a, b) = (self.path[i], self.path[i + 1]);
        (a.x + (b.x - a.x) * local, a.y + (b.y - a.y) * local)
    }

    /// Occlusion strength in `[0, 1]` at center offset `(dx, dy)`: 1 deep
    /// inside the support, 0 far outside, an erf ramp across the boundary.
    fn occlusion(&self, dx: f64, dy: f64) -> f64 {
        let d = self.shape.signed_distance(dx, dy);
        if self.blur_sigma <= 0.0 {
            if d < 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            0.5 * erfc(d / (self.blur_sigma * std::f64::consts::SQRT_2))
        }
    }
}

/// Complete description of a synthetic sequence.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScenarioSpec {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub background: Background,
    /// The tracked shadow.
    pub target: Occluder,
    /// Additional dark objects; unlike the target they may leave the frame.
    pub distractors: Vec<Occluder>,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width < 16 || self.height < 16 {
            return Err(Error::Scenario(format!(
                "frame size {}x{} is too small",
                self.width, self.height
            )));
        }
        if self.frames < 2 {
            return Err(Error::Scenario(format!(
                "a sequence needs at least 2 frames, got {}",
                self.frames
            )));
        }
        for occ in std::iter::once(&self.target).chain(&self.distractors) {
            if occ.path.is_empty() {
                return Err(Error::Scenario("occluder path has no waypoints".into()));
            }
            if !(occ.attenuation > 0.0 && occ.attenuation < 1.0) {
                return Err(Error::Scenario(format!(
                    "attenuation must lie in (0, 1), got {}",
                    occ.attenuation
                )));
            }
            if occ.blur_sigma < 0.0 {
                return Err(Error::Scenario("blur sigma must be nonnegative".into()));
            }
        }
        // The target must stay inside the frame along the whole path.
        let (hx, hy) = self.target.shape.half_extent();
        let mx = hx + self.target.blur_sigma;
        let my = hy + self.target.blur_sigma;
        for t in 0..self.frames {
            let (x, y) = self.target.position(t, self.frames);
            if x - mx < 0.0
                || y - my < 0.0
                || x + mx > self.width as f64
                || y + my > self.height as f64
            {
                return Err(Error::Scenario(format!(
                    "target exits the frame at frame {t}: center ({x:.1}, {y:.1})"
                )));
            }
        }
        Ok(())
    }
}

/// Per-frame ground truth for a generated sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// Tight box around the target support, one per frame.
    pub boxes: Vec<BoundingBox>,
    /// Rendered target pixel area (occlusion ≥ ½), one per frame.
    pub areas: Vec<f64>,
}

fn background_raster(spec: &ScenarioSpec) -> Vec<f64> {
    let n = spec.width * spec.height;
    match spec.background {
        Background::Flat { level } => vec![level; n],
        Background::Noise { level, amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            (0..n)
                .map(|_| (level + rng.random_range(-amplitude..amplitude)).clamp(0.0, 255.0))
                .collect()
        }
        Background::Tiles { light, dark, tile } => {
            let tile = tile.max(1);
            let mut out = Vec::with_capacity(n);
            for y in 0..spec.height {
                for x in 0..spec.width {
                    let checker = (x / tile + y / tile) % 2 == 0;
                    out.push(if checker { light } else { dark });
                }
            }
            out
        }
    }
}

fn apply_occluder(
    data: &mut [f64],
    width: usize,
    height: usize,
    occ: &Occluder,
    center: (f64, f64),
) {
    let (hx, hy) = occ.shape.half_extent();
    // 4 sigma of penumbra on each side covers the ramp to < 1e-4.
    let margin = 4.0 * occ.blur_sigma + 1.0;
    let x0 = ((center.0 - hx - margin).floor().max(0.0)) as usize;
    let y0 = ((center.1 - hy - margin).floor().max(0.0)) as usize;
    let x1 = ((center.0 + hx + margin).ceil()).min(width as f64) as usize;
    let y1 = ((center.1 + hy + margin).ceil()).min(height as f64) as usize;
    let darkening = 1.0 - occ.attenuation;
    for y in y0..y1 {
        for x in x0..x1 {
            let o = occ.occlusion(x as f64 + 0.5 - center.0, y as f64 + 0.5 - center.1);
            if o > 0.0 {
                data[y * width + x] *= 1.0 - darkening * o;
            }
        }
    }
}

/// Renders one frame of the scenario. Intensities are quantized to whole
/// values in `[0, 255]`, matching what a frame decoded from disk would hold.
pub fn render_frame(spec: &ScenarioSpec, frame: usize) -> Result<Frame> {
    if frame >= spec.frames {
        return Err(Error::Scenario(format!(
            "frame {frame} out of range, scenario has {} frames",
            spec.frames
        )));
    }
    let mut data = background_raster(spec);
    apply_occluder(
        &mut data,
        spec.width,
        spec.height,
        &spec.target,
        spec.target.position(frame, spec.frames),
    );
    for d in &spec.distractors {
        apply_occluder(
            &mut data,
            spec.width,
            spec.height,
            d,
            d.position(frame, spec.frames),
        );
    }
    for v in data.iter_mut() {
        *v = v.round().clamp(0.0, 255.0);
    }
    Frame::new(spec.width, spec.height, data)
}

/// Ground truth for every frame: box centered on the target path with the
/// support's extent, plus the rendered pixel area of the target.
pub fn ground_truth(spec: &ScenarioSpec) -> Result<GroundTruth> {
    spec.validate()?;
    let (hx, hy) = spec.target.shape.half_extent();
    let mut boxes = Vec::with_capacity(spec.frames);
    let mut areas = Vec::with_capacity(spec.frames);
    for t in 0..spec.frames {
        let (cx, cy) = spec.target.position(t, spec.frames);
        boxes.push(BoundingBox::new(cx, cy, 2.0 * hx, 2.0 * hy)?);

        let x0 = (cx - hx - 2.0).floor() as i64;
        let y0 = (cy - hy - 2.0).floor() as i64;
        let x1 = (cx + hx + 2.0).ceil() as i64;
        let y1 = (cy + hy + 2.0).ceil() as i64;
        let mut count = 0usize;
        for y in y0..y1 {
            for x in x0..x1 {
                let o = spec
                    .target
                    .occlusion(x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
                if o >= 0.5 {
                    count += 1;
                }
            }
        }
        areas.push(count as f64);
    }
    Ok(GroundTruth { boxes, areas })
}

/// Renders the whole sequence with its ground truth.
pub fn generate(spec: &ScenarioSpec) -> Result<(Vec<Frame>, GroundTruth)> {
    spec.validate()?;
    let gt = ground_truth(spec)?;
    let frames = (0..spec.frames)
        .map(|t| render_frame(spec, t))
        .collect::<Result<Vec<_>>>()?;
    Ok((frames, gt))
}

/// Built-in difficulty classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Flat ground, no distractors.
    FlatEasy,
    /// The target crosses a large near-black rectangle.
    DarkCrossing,
    /// High-variance noise background.
    Textured,
    /// A second moving dark ellipse crosses the target's path.
    MovingDistractor,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::FlatEasy,
        Preset::DarkCrossing,
        Preset::Textured,
        Preset::MovingDistractor,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::FlatEasy => "flat_easy",
            Preset::DarkCrossing => "dark_crossing",
            Preset::Textured => "textured",
            Preset::MovingDistractor => "moving_distractor",
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Preset::ALL
            .iter()
            .find(|p| p.name() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                format!(
                    "unknown preset {s:?}; available presets: {}",
                    names.join(", ")
                )
            })
    }
}

/// Preset at the default 640×360, 100 frames.
pub fn preset(kind: Preset) -> ScenarioSpec {
    preset_sized(kind, 640, 360, 100).expect("default preset dimensions are valid")
}

/// Preset scaled to an arbitrary frame size and length.
pub fn preset_sized(
    kind: Preset,
    width: usize,
    height: usize,
    frames: usize,
) -> Result<ScenarioSpec> {
    let w = width as f64;
    let h = height as f64;
    let rx = (w * 0.022).round().max(6.0);
    let ry = (h * 0.028).round().max(4.0);
    let target_shape = Shape::Ellipse { rx, ry };
    let mid_y = (h * 0.5).round();
    let path = vec![
        Waypoint {
            x: (w * 0.15).round(),
            y: mid_y,
        },
        Waypoint {
            x: (w * 0.85).round(),
            y: mid_y,
        },
    ];
    let target = Occluder {
        shape: target_shape,
        attenuation: 0.35,
        blur_sigma: 1.5,
        path,
    };

    let spec = match kind {
        Preset::FlatEasy => ScenarioSpec {
            width,
            height,
            frames,
            background: Background::Flat { level: 200.0 },
            target,
            distractors: vec![],
            seed: 11,
        },
        Preset::DarkCrossing => ScenarioSpec {
            width,
            height,
            frames,
            background: Background::Flat { level: 200.0 },
            target,
            distractors: vec![Occluder {
                shape: Shape::Rect {
                    w: (w * 0.19).round(),
                    h: (h * 0.30).round(),
                },
                attenuation: 0.04,
                blur_sigma: 0.0,
                path: vec![Waypoint {
                    x: (w * 0.5).round(),
                    y: mid_y,
                }],
            }],
            seed: 11,
        },
        Preset::Textured => ScenarioSpec {
            width,
            height,
            frames,
            background: Background::Noise {
                level: 160.0,
                amplitude: 45.0,
            },
            target,
            distractors: vec![],
            seed: 11,
        },
        Preset::MovingDistractor => ScenarioSpec {
            width,
            height,
            frames,
            background: Background::Flat { level: 200.0 },
            target,
            distractors: vec![Occluder {
                shape: Shape::Ellipse {
                    rx: rx * 1.3,
                    ry: ry * 1.3,
                },
                attenuation: 0.3,
                blur_sigma: 1.5,
                path: vec![
                    Waypoint {
                        x: (w * 0.5).round(),
                        y: (h * 0.12).round(),
                    },
                    Waypoint {
                        x: (w * 0.5).round(),
                        y: (h * 0.88).round(),
                    },
                ],
            }],
            seed: 11,
        },
    };
    spec.validate()?;
    Ok(spec)
}

/// Complementary error function via the Abramowitz–Stegun rational
/// approximation of erf (absolute error below 1.5e-7).
fn erfc(x: f64) -> f64 {
    1.0 - erf(x)
}

fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let poly = t
        * (0.254829592
            + t * (-0.284496736 + t * (1.421413741 + t * (-1.453152027 + t * 1.061405429))));
    sign * (1.0 - poly * (-x * x).exp())
}
