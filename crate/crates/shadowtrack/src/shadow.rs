//! Adaptive-threshold shadow detection.
//!
//! A pixel is classified as shadow when it is darker than a fixed fraction of
//! the mean intensity of its local neighborhood. Local means come from an
//! integral image, so the whole pass is two sweeps over the frame regardless
//! of window size. The resulting [`BinaryMask`] feeds both the
//! tracking-failure predictor and the fused recovery mode; any detector with
//! the same signature can stand in for this one.

use crate::imaging::{dilate, erode, BinaryMask, Frame, IntegralImage};
use crate::{Error, Result};

/// Parameters of the adaptive threshold.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShadowDetectorConfig {
    /// Side of the square window whose mean each pixel is compared against.
    pub window: usize,
    /// A pixel is shadow when it falls below `threshold_factor` times its
    /// window mean; must lie strictly between 0 and 1.
    pub threshold_factor: f64,
}

impl ShadowDetectorConfig {
    pub fn new(window: usize, threshold_factor: f64) -> Result<Self> {
        if window < 2 {
            return Err(Error::Config(format!(
                "detector window must be at least 2, got {window}"
            )));
        }
        if !(threshold_factor > 0.0 && threshold_factor < 1.0) {
            return Err(Error::Config(format!(
                "threshold factor must lie in (0, 1), got {threshold_factor}"
            )));
        }
        Ok(ShadowDetectorConfig {
            window,
            threshold_factor,
        })
    }
}

impl Default for ShadowDetectorConfig {
    fn default() -> Self {
        ShadowDetectorConfig {
            window: 16,
            threshold_factor: 0.85,
        }
    }
}

/// Marks pixel `p` as shadow iff `intensity(p) < threshold_factor × mean` of
/// the window-sized neighborhood centered on `p`, with the window clamped at
/// the borders. Output dimensions equal the frame's.
pub fn detect_shadows(frame: &Frame, cfg: &ShadowDetectorConfig) -> BinaryMask {
    let (w, h) = (frame.width(), frame.height());
    let ii = IntegralImage::new(frame);
    let half = (cfg.window / 2) as i64;
    let win = cfg.window as i64;

    let mut mask = BinaryMask::empty(w, h).expect("frame dims are valid mask dims");
    for y in 0..h {
        let y0 = (y as i64 - half).max(0) as usize;
        let y1 = (y as i64 - half + win).min(h as i64) as usize;
        for x in 0..w {
            let x0 = (x as i64 - half).max(0) as usize;
            let x1 = (x as i64 - half + win).min(w as i64) as usize;
            let area = ((x1 - x0) * (y1 - y0)) as f64;
            let mean = ii.rect_sum(x0, y0, x1, y1) / area;
            if frame.get(x, y) < cfg.threshold_factor * mean {
                mask.set(x, y, true);
            }
        }
    }
    mask
}

/// Morphological opening (erosion then dilation) with the 3×3 kernel;
/// removes isolated noise pixels from a detection mask.
pub fn clean_mask(mask: &BinaryMask) -> BinaryMask {
    dilate(&erode(mask))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_bounds_are_enforced() {
        assert!(ShadowDetectorConfig::new(1, 0.85).is_err());
        assert!(ShadowDetectorConfig::new(16, 0.0).is_err());
        assert!(ShadowDetectorConfig::new(16, 1.0).is_err());
        assert!(ShadowDetectorConfig::new(2, 0.5).is_ok());
    }

    #[test]
    fn uniform_frame_yields_empty_mask() {
        let f = Frame::filled(40, 30, 128.0).unwrap();
        let mask = detect_shadows(&f, &ShadowDetectorConfig::default());
        assert_eq!(mask.count_set(), 0);
    }

    #[test]
    fn all_zero_frame_yields_empty_mask() {
        // Strict inequality: 0 < 0.85 * 0 is false.
        let f = Frame::filled(24, 24, 0.0).unwrap();
        let mask = detect_shadows(&f, &ShadowDetectorConfig::default());
        assert_eq!(mask.count_set(), 0);
    }

    /// Straight-line re-evaluation of the thresholding rule, used as the
    /// oracle for the integral-image implementation.
    fn detect_brute_force(frame: &Frame, cfg: &ShadowDetectorConfig) -> BinaryMask {
        let (w, h) = (frame.width(), frame.height());
        let half = (cfg.window / 2) as i64;
        let win = cfg.window as i64;
        let mut mask = BinaryMask::empty(w, h).unwrap();
        for y in 0..h {
            for x in 0..w {
                let x0 = (x as i64 - half).max(0) as usize;
                let x1 = (x as i64 - half + win).min(w as i64) as usize;
                let y0 = (y as i64 - half).max(0) as usize;
                let y1 = (y as i64 - half + win).min(h as i64) as usize;
                let mut sum = 0.0;
                for yy in y0..y1 {
                    for xx in x0..x1 {
                        sum += frame.get(xx, yy);
                    }
                }
                let mean = sum / ((x1 - x0) * (y1 - y0)) as f64;
                if frame.get(x, y) < cfg.threshold_factor * mean {
                    mask.set(x, y, true);
                }
            }
        }
        mask
    }

    #[test]
    fn dark_block_on_bright_ground() {
        // 60x60 frame of 200s with a 20x20 block of 40s: pixels whose window
        // mixes block and background get marked; the far background never is.
        let mut f = Frame::filled(60, 60, 200.0).unwrap();
        for y in 20..40 {
            for x in 20..40 {
                f.set(x, y, 40.0);
            }
        }
        let cfg = ShadowDetectorConfig::default();
        let mask = detect_shadows(&f, &cfg);

        assert_eq!(mask, detect_brute_force(&f, &cfg));

        // Block edge pixels see bright context, so they are well below the
        // local mean.
        assert!(mask.get(21, 30));
        assert!(mask.get(38, 30));
        // Background far from the block is at its own mean.
        assert!(!mask.get(5, 5));
        assert!(!mask.get(55, 55));
        // A pixel can never be marked unless it is a block pixel.
        for y in 0..60 {
            for x in 0..60 {
                if mask.get(x, y) {
                    assert_eq!(f.get(x, y), 40.0, "marked non-block pixel ({x},{y})");
                }
            }
        }
        assert!(mask.count_set() > 100);
    }

    #[test]
    fn threshold_is_scale_invariant() {
        // Both sides of the strict inequality scale by k, so the mask cannot
        // change under global brightening/darkening.
        let mut f = Frame::filled(32, 32, 180.0).unwrap();
        for y in 10..20 {
            for x in 8..24 {
                f.set(x, y, 60.0);
            }
        }
        let cfg = ShadowDetectorConfig::default();
        let base = detect_shadows(&f, &cfg);
        for k in [0.5, 1.3, 2.0] {
            let scaled_data: Vec<f64> = f.data().iter().map(|&v| v * k).collect();
            let scaled = Frame::new(32, 32, scaled_data).unwrap();
            assert_eq!(detect_shadows(&scaled, &cfg), base, "scale {k}");
        }
    }

    #[test]
    fn opening_removes_isolated_pixels() {
        let mut m = BinaryMask::empty(20, 20).unwrap();
        for &(x, y) in &[(2, 2), (7, 13), (15, 4), (19, 19)] {
            m.set(x, y, true);
        }
        assert_eq!(clean_mask(&m).count_set(), 0);
    }

    #[test]
    fn opening_keeps_solid_block_interior() {
        let mut m = BinaryMask::empty(20, 20).unwrap();
        for y in 5..15 {
            for x in 5..15 {
                m.set(x, y, true);
            }
        }
        let cleaned = clean_mask(&m);
        // Opening never adds pixels.
        for y in 0..20 {
            for x in 0..20 {
                if cleaned.get(x, y) {
                    assert!(m.get(x, y));
                }
            }
        }
        // The 10x10 block erodes to 8x8 and dilates back to 10x10.
        assert_eq!(cleaned, m);
    }

    #[test]
    fn opening_an_all_true_mask_restores_it() {
        // The border ring erodes away (out-of-bounds counts as background)
        // and dilation grows the interior right back out.
        let mut m = BinaryMask::empty(6, 4).unwrap();
        for y in 0..4 {
            for x in 0..6 {
                m.set(x, y, true);
            }
        }
        assert_eq!(clean_mask(&m), m);
    }
}
