//! Frequency-domain correlation filtering.
//!
//! A filter is trained in closed form from a target patch `F` and a desired
//! response `G` (a compact Gaussian peak on the target center): the filter
//! spectrum is the elementwise ratio of the accumulated `Ĝ ⊙ F̂*` and
//! `F̂ ⊙ F̂* + ε` terms. Correlating a search patch against the filter is a
//! single spectrum product plus an inverse transform; the response argmax is
//! the predicted target center. Online updates blend new accumulator terms
//! with exponential forgetting.

pub mod fft;

pub use rustfft::num_complex::Complex64;

use crate::imaging::{extract_patch, BoundingBox, Frame};
use crate::{Error, Result};

/// Filter design and update parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FilterConfig {
    /// Standard deviation of the desired Gaussian response, in pixels.
    pub sigma: f64,
    /// Exponential forgetting factor for online updates, in `(0, 1]`.
    pub learning_rate: f64,
    /// Regularizer added to every denominator term; keeps responses finite
    /// on flat patches.
    pub epsilon: f64,
    /// Number of randomly perturbed copies of the training patch accumulated
    /// at initialization, in addition to the unperturbed patch.
    pub augmentations: usize,
    /// Seed for the augmentation perturbations.
    pub seed: u64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            sigma: 2.0,
            learning_rate: 0.125,
            epsilon: 1e-3,
            augmentations: 8,
            seed: 7,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::Config(format!(
                "response sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !self.learning_rate.is_finite() || !(0.0..=1.0).contains(&self.learning_rate) {
            return Err(Error::Config(format!(
                "learning rate must lie in [0, 1], got {}",
                self.learning_rate
            )));
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return Err(Error::Config(format!(
                "regularizer must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// The training target: a Gaussian peak with maximum exactly 1 at the peak
/// pixel, strictly decreasing with distance.
#[derive(Debug, Clone, PartialEq)]
pub struct DesiredResponse {
    width: usize,
    height: usize,
    sigma: f64,
    data: Vec<f64>,
}

impl DesiredResponse {
    /// Peak at the center pixel `(width/2, height/2)`.
    pub fn centered(width: usize, height: usize, sigma: f64) -> Self {
        DesiredResponse::with_peak(width, height, (width / 2, height / 2), sigma)
    }

    /// Peak at an arbitrary pixel.
    pub fn with_peak(width: usize, height: usize, peak: (usize, usize), sigma: f64) -> Self {
        let denom = 2.0 * sigma * sigma;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let dx = x as f64 - peak.0 as f64;
                let dy = y as f64 - peak.1 as f64;
                data.push((-(dx * dx + dy * dy) / denom).exp());
            }
        }
        DesiredResponse {
            width,
            height,
            sigma,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Real-valued correlation response over a search region.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
    /// Pixel offset of the region in frame coordinates; the response value at
    /// index `(x, y)` refers to frame position `origin + (x, y)`.
    pub origin: (i64, i64),
}

impl CorrelationMap {
    /// Assembles a map from raw parts, for callers composing their own
    /// response post-processing.
    pub fn from_parts(
        width: usize,
        height: usize,
        data: Vec<f64>,
        origin: (i64, i64),
    ) -> Result<Self> {
        if data.is_empty() || data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "map data has {} values, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(CorrelationMap {
            width,
            height,
            data,
            origin,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Location of the maximum response; ties resolve to the first maximum in
    /// scan order, so the result is deterministic.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        let mut best_val = self.data[0];
        for (i, &v) in self.data.iter().enumerate().skip(1) {
            if v > best_val {
                best_val = v;
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }

    pub fn max_value(&self) -> f64 {
        let (x, y) = self.argmax();
        self.data[y * self.width + x]
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Log-intensity normalization: `log(1 + v)`, then shift to zero mean and
/// scale to unit Frobenius norm. A zero-variance patch maps to all zeros;
/// the threshold below the smallest representable image contrast keeps
/// rounding residue of constant patches from being blown up to unit norm.
pub fn log_normalize(patch: &Frame) -> Vec<f64> {
    let mut out: Vec<f64> = patch.data().iter().map(|&v| (1.0 + v).ln()).collect();
    let mean = out.iter().sum::<f64>() / out.len() as f64;
    for v in out.iter_mut() {
        *v -= mean;
    }
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1e-8 {
        for v in out.iter_mut() {
            *v /= norm;
        }
    } else {
        out.fill(0.0);
    }
    out
}

/// Separable raised-cosine (Hann) window; exactly zero on the border.
pub fn hann_window(width: usize, height: usize) -> Vec<f64> {
    let axis = |n: usize, i: usize| -> f64 {
        if n <= 1 {
            1.0
        } else {
            0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        }
    };
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        let wy = axis(height, y);
        for x in 0..width {
            out.push(wy * axis(width, x));
        }
    }
    out
}

/// Full patch preprocessing: log normalization followed by Hann windowing.
pub fn preprocess(patch: &Frame) -> Vec<f64> {
    let mut out = log_normalize(patch);
    for (v, w) in out
        .iter_mut()
        .zip(hann_window(patch.width(), patch.height()))
    {
        *v *= w;
    }
    out
}

/// Frequency-domain filter state: the numerator and denominator accumulators
/// of the closed-form solution. The filter spectrum itself is their
/// elementwise ratio and is formed on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationFilter {
    width: usize,
    height: usize,
    numerator: Vec<Complex64>,
    denominator: Vec<Complex64>,
    config: FilterConfig,
}

impl CorrelationFilter {
    /// Trains a filter on the target region of a frame. The training patch is
    /// the target padded by `padding` in each dimension (rounded up to even),
    /// and the accumulators average the unperturbed patch plus
    /// `config.augmentations` randomly rotated/shifted copies.
    pub fn init(
        frame: &Frame,
        target: &BoundingBox,
        padding: f64,
        config: &FilterConfig,
    ) -> Result<Self> {
        config.validate()?;
        if padding < 1.0 {
            return Err(Error::Config(format!(
                "padding factor must be >= 1, got {padding}"
            )));
        }
        if target.w.round() < 4.0 || target.h.round() < 4.0 {
            return Err(Error::Geometry(format!(
                "target box must be at least 4x4 pixels, got {}x{}",
                target.w, target.h
            )));
        }
        let width = even_up((target.w * padding).round() as usize);
        let height = even_up((target.h * padding).round() as usize);
        let region = BoundingBox::new(target.cx, target.cy, width as f64, height as f64)?;
        let patch = extract_patch(frame, &region);

        let response = DesiredResponse::centered(width, height, config.sigma);
        let g_hat = fft::forward(response.data(), width, height);

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);

        let mut numerator = vec![Complex64::default(); width * height];
        let mut denominator = vec![Complex64::default(); width * height];
        let mut accumulate = |train: &Frame| {
            let f_hat = fft::forward(&preprocess(train), width, height);
            for i in 0..f_hat.len() {
                let conj = f_hat[i].conj();
                numerator[i] += g_hat[i] * conj;
                denominator[i] += f_hat[i] * conj + config.epsilon;
            }
        };

        accumulate(&patch);
        for _ in 0..config.augmentations {
            let angle = rng.random_range(-5.0f64..5.0).to_radians();
            let shift = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            accumulate(&warp_patch(&patch, angle, shift));
        }

        let count = (config.augmentations + 1) as f64;
        for v in numerator.iter_mut() {
            *v /= count;
        }
        for v in denominator.iter_mut() {
            *v /= count;
        }

        Ok(CorrelationFilter {
            width,
            height,
            numerator,
            denominator,
            config: *config,
        })
    }

    /// Accumulates a single training pair without padding, augmentation, or
    /// patch extraction: the preprocessed `patch` spectrum against `response`.
    pub fn from_training_pair(
        patch: &Frame,
        response: &DesiredResponse,
        config: &FilterConfig,
    ) -> Result<Self> {
        config.validate()?;
        let (w, h) = (patch.width(), patch.height());
        if response.width() != w || response.height() != h {
            return Err(Error::DimensionMismatch(format!(
                "response is {}x{}, patch is {}x{}",
                response.width(),
                response.height(),
                w,
                h
            )));
        }
        let f_hat = fft::forward(&preprocess(patch), w, h);
        let g_hat = fft::forward(response.data(), w, h);
        let mut numerator = Vec::with_capacity(w * h);
        let mut denominator = Vec::with_capacity(w * h);
        for i in 0..f_hat.len() {
            let conj = f_hat[i].conj();
            numerator.push(g_hat[i] * conj);
            denominator.push(f_hat[i] * conj + config.epsilon);
        }
        Ok(CorrelationFilter {
            width: w,
            height: h,
            numerator,
            denominator,
            config: *config,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn config(&self) -> &FilterConfig {
        &self.config
    }

    pub fn numerator(&self) -> &[Complex64] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[Complex64] {
        &self.denominator
    }

    /// The filter spectrum `H*`: elementwise numerator / denominator.
    pub fn spectrum(&self) -> Vec<Complex64> {
        self.numerator
            .iter()
            .zip(&self.denominator)
            .map(|(n, d)| n / d)
            .collect()
    }

    /// Correlates a search patch against the filter.
    ///
    /// When the patch matches the filter dimensions the response is the
    /// inverse transform of `patcĥ ⊙ H*`. A larger patch (recovery search)
    /// re-renders the filter at the enlarged size: the spatial-domain kernel
    /// is zero-padded — preserving its wrap-around layout — and transformed
    /// back, so the response covers the whole enlarged patch. Patches smaller
    /// than the filter are an error.
    pub fn correlate(&self, patch: &Frame) -> Result<CorrelationMap> {
        let (pw, ph) = (patch.width(), patch.height());
        if pw < self.width || ph < self.height {
            return Err(Error::DimensionMismatch(format!(
                "patch {}x{} is smaller than the {}x{} filter",
                pw, ph, self.width, self.height
            )));
        }
        if pw % 2 != 0 || ph % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "patch dimensions must be even, got {pw}x{ph}"
            )));
        }

        let spectrum = if (pw, ph) == (self.width, self.height) {
            self.spectrum()
        } else {
            self.spectrum_at(pw, ph)
        };

        let p_hat = fft::forward(&preprocess(patch), pw, ph);
        let product: Vec<Complex64> = p_hat.iter().zip(&spectrum).map(|(p, h)| p * h).collect();
        let response = fft::inverse(&product, pw, ph);
        Ok(CorrelationMap {
            width: pw,
            height: ph,
            data: response.iter().map(|v| v.re).collect(),
            origin: (0, 0),
        })
    }

    /// Filter spectrum re-rendered at an enlarged size via spatial zero
    /// padding that keeps kernel taps on their side of the wrap-around.
    fn spectrum_at(&self, width: usize, height: usize) -> Vec<Complex64> {
        let small = fft::inverse(&self.spectrum(), self.width, self.height);
        let mut embedded = vec![Complex64::default(); width * height];
        for y in 0..self.height {
            let dst_y = if y < self.height / 2 {
                y
            } else {
                y + height - self.height
            };
            for x in 0..self.width {
                let dst_x = if x < self.width / 2 {
                    x
                } else {
                    x + width - self.width
                };
                embedded[dst_y * width + dst_x] = small[y * self.width + x];
            }
        }
        fft::forward_complex(&mut embedded, width, height);
        embedded
    }

    /// Returns the filter blended with a fresh accumulation on `patch`, with
    /// the desired response recentered on the detected `peak` pixel. A zero
    /// learning rate returns the filter unchanged.
    pub fn updated(&self, patch: &Frame, peak: (usize, usize)) -> Result<Self> {
        if (patch.width(), patch.height()) != (self.width, self.height) {
            return Err(Error::DimensionMismatch(format!(
                "update patch is {}x{}, filter is {}x{}",
                patch.width(),
                patch.height(),
                self.width,
                self.height
            )));
        }
        let eta = self.config.learning_rate;
        if eta == 0.0 {
            return Ok(self.clone());
        }

        let response = DesiredResponse::with_peak(self.width, self.height, peak, self.config.sigma);
        let g_hat = fft::forward(response.data(), self.width, self.height);
        let f_hat = fft::forward(&preprocess(patch), self.width, self.height);

        let keep = 1.0 - eta;
        let mut numerator = Vec::with_capacity(self.numerator.len());
        let mut denominator = Vec::with_capacity(self.denominator.len());
        for i in 0..f_hat.len() {
            let conj = f_hat[i].conj();
            numerator.push(self.numerator[i] * keep + g_hat[i] * conj * eta);
            denominator
                .push(self.denominator[i] * keep + (f_hat[i] * conj + self.config.epsilon) * eta);
        }
        Ok(CorrelationFilter {
            width: self.width,
            height: self.height,
            numerator,
            denominator,
            config: self.config,
        })
    }
}

/// Rounds odd dimensions up by one; the transforms work on even-sized arrays.
pub(crate) fn even_up(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n.max(2)
    } else {
        n + 1
    }
}

/// Rotates by `angle` about the patch center and translates by `shift`,
/// sampling bilinearly with edge replication.
fn warp_patch(patch: &Frame, angle: f64, shift: (f64, f64)) -> Frame {
    let (w, h) = (patch.width(), patch.height());
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let (sin, cos) = angle.sin_cos();
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let dx = x as f64 - cx - shift.0;
            let dy = y as f64 - cy - shift.1;
            let sx = cos * dx - sin * dy + cx;
            let sy = sin * dx + cos * dy + cy;
            data.push(sample_bilinear(patch, sx, sy));
        }
    }
    Frame::new(w, h, data).expect("warp preserves dims")
}

fn sample_bilinear(patch: &Frame, x: f64, y: f64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (xi, yi) = (x0 as i64, y0 as i64);
    let v00 = patch.get_replicated(xi, yi);
    let v10 = patch.get_replicated(xi + 1, yi);
    let v01 = patch.get_replicated(xi, yi + 1);
    let v11 = patch.get_replicated(xi + 1, yi + 1);
    v00 * (1.0 - fx) * (1.0 - fy) + v10 * fx * (1.0 - fy) + v01 * (1.0 - fx) * fy + v11 * fx * fy
}
