//! Summed-area table for O(1) rectangle sums and means.

use super::{BoundingBox, Frame};
use crate::{Error, Result};

/// `(width+1) × (height+1)` table of cumulative sums with an extra zero row
/// and column: entry `(x, y)` is the sum of all intensities in rows `[0, y)`
/// and columns `[0, x)`.
#[derive(Debug, Clone)]
pub struct IntegralImage {
    width: usize,
    height: usize,
    table: Vec<f64>,
}

impl IntegralImage {
    pub fn new(frame: &Frame) -> Self {
        let w = frame.width();
        let h = frame.height();
        let stride = w + 1;
        let mut table = vec![0.0; stride * (h + 1)];
        for y in 0..h {
            let mut row_sum = 0.0;
            for x in 0..w {
                row_sum += frame.get(x, y);
                table[(y + 1) * stride + (x + 1)] = table[y * stride + (x + 1)] + row_sum;
            }
        }
        IntegralImage {
            width: w,
            height: h,
            table,
        }
    }

    /// Source image width (the table itself has one extra column).
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x <= self.width && y <= self.height);
        self.table[y * (self.width + 1) + x]
    }

    /// Sum over the half-open pixel rectangle `[x0, x1) × [y0, y1)`; four
    /// table lookups.
    #[inline]
    pub fn rect_sum(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> f64 {
        debug_assert!(x0 <= x1 && y0 <= y1 && x1 <= self.width && y1 <= self.height);
        self.at(x1, y1) - self.at(x0, y1) - self.at(x1, y0) + self.at(x0, y0)
    }
}

/// Mean intensity over a rectangle, clamped to image bounds first. Errors
/// when the rectangle lies entirely outside the image.
pub fn rect_mean(ii: &IntegralImage, rect: &BoundingBox) -> Result<f64> {
    let clamped = rect
        .pixel_extent()
        .clamped(ii.width(), ii.height())
        .ok_or_else(|| {
            Error::Geometry(format!(
                "rectangle centered at ({}, {}) lies outside the {}x{} image",
                rect.cx,
                rect.cy,
                ii.width(),
                ii.height()
            ))
        })?;
    let sum = ii.rect_sum(
        clamped.x0 as usize,
        clamped.y0 as usize,
        clamped.x1 as usize,
        clamped.y1 as usize,
    );
    Ok(sum / (clamped.width() * clamped.height()) as f64)
}
