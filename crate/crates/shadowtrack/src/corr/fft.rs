//! Minimal 2D FFT on row-major buffers, built from rustfft's 1D transforms.
//!
//! The inverse transform is normalized by `1 / (width × height)`, so
//! `inverse(forward(x)) == x` up to rounding.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(PlanCache::new());
}

struct PlanCache {
    planner: FftPlanner<f64>,
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
}

impl PlanCache {
    fn new() -> Self {
        PlanCache {
            planner: FftPlanner::new(),
            forward: HashMap::new(),
            inverse: HashMap::new(),
        }
    }
}

impl PlanCache {
    fn forward(&mut self, len: usize) -> Arc<dyn Fft<f64>> {
        self.forward
            .entry(len)
            .or_insert_with(|| self.planner.plan_fft_forward(len))
            .clone()
    }

    fn inverse(&mut self, len: usize) -> Arc<dyn Fft<f64>> {
        self.inverse
            .entry(len)
            .or_insert_with(|| self.planner.plan_fft_inverse(len))
            .clone()
    }
}

fn transform_2d(buf: &mut [Complex64], width: usize, height: usize, inverse: bool) {
    assert_eq!(buf.len(), width * height, "buffer must be width*height");
    let (row_fft, col_fft) = PLANS.with(|cache| {
        let mut cache = cache.borrow_mut();
        if inverse {
            (cache.inverse(width), cache.inverse(height))
        } else {
            (cache.forward(width), cache.forward(height))
        }
    });

    for row in buf.chunks_mut(width) {
        row_fft.process(row);
    }

    let mut column = vec![Complex64::default(); height];
    for x in 0..width {
        for y in 0..height {
            column[y] = buf[y * width + x];
        }
        col_fft.process(&mut column);
        for y in 0..height {
            buf[y * width + x] = column[y];
        }
    }

    if inverse {
        let scale = 1.0 / (width * height) as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

/// Forward 2D transform of a real buffer.
pub fn forward(data: &[f64], width: usize, height: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_2d(&mut buf, width, height, false);
    buf
}

/// Forward 2D transform of a complex buffer, in place.
pub fn forward_complex(buf: &mut [Complex64], width: usize, height: usize) {
    transform_2d(buf, width, height, false);
}

/// Normalized inverse 2D transform.
pub fn inverse(spectrum: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    transform_2d(&mut buf, width, height, true);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_reproduces_input() {
        // Deterministic pseudo-random fill.
        let (w, h) = (24, 18);
        let data: Vec<f64> = (0..w * h)
            .map(|i| ((i * 2654435761usize) % 1000) as f64 / 500.0 - 1.0)
            .collect();
        let spec = forward(&data, w, h);
        let back = inverse(&spec, w, h);
        for (orig, got) in data.iter().zip(&back) {
            assert!((orig - got.re).abs() < 1e-12);
            assert!(got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn dc_bin_is_the_sum() {
        let data = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let spec = forward(&data, 3, 2);
        assert!((spec[0].re - 21.0).abs() < 1e-12);
        assert!(spec[0].im.abs() < 1e-12);
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let mut data = vec![0.0; 16];
        data[0] = 1.0;
        let spec = forward(&data, 4, 4);
        for v in &spec {
            assert!((v.re - 1.0).abs() < 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
    }
}
