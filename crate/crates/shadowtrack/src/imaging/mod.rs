//! Pixel-level primitives shared by every other module.
//!
//! A [`Frame`] is a single-channel raster with real-valued intensities in
//! `[0, 255]`, stored row-major. All geometry uses a continuous coordinate
//! frame in which pixel `(x, y)` occupies the half-open square
//! `[x, x+1) × [y, y+1)`, so a W×H image spans `[0, W) × [0, H)` and box
//! centers are sub-pixel.

mod components;
mod integral;
mod io;
mod morphology;

pub use components::{connected_components, Component};
pub use integral::{rect_mean, IntegralImage};
pub use io::{frame_filename, list_frames, load_frame, save_frame, ImageFormat};
pub use morphology::{dilate, erode};

use crate::{Error, Result};

/// Single-channel intensity raster; the unit of all pixel processing.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Frame {
    /// Wraps row-major intensity data. Fails when the buffer does not match
    /// the stated dimensions or either dimension is zero.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Geometry(format!(
                "frame dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "frame data has {} samples, expected {}x{} = {}",
                data.len(),
                width,
                height,
                width * height
            )));
        }
        Ok(Frame {
            width,
            height,
            data,
        })
    }

    /// A frame filled with a constant intensity.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Frame::new(width, height, vec![value; width * height])
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

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x] = value;
    }

    /// Reads with edge replication: out-of-bounds coordinates clamp to the
    /// nearest border pixel.
    #[inline]
    pub fn get_replicated(&self, x: i64, y: i64) -> f64 {
        let cx = x.clamp(0, self.width as i64 - 1) as usize;
        let cy = y.clamp(0, self.height as i64 - 1) as usize;
        self.data[cy * self.width + cx]
    }

    /// Quantizes intensities to `u8` (round, clamp to `[0, 255]`).
    pub fn to_u8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|&v| v.round().clamp(0.0, 255.0) as u8)
            .collect()
    }
}

/// Axis-aligned target region: sub-pixel center plus dimensions.
///
/// Intersection/union arithmetic uses the half-open extents
/// `[cx − w/2, cx + w/2) × [cy − h/2, cy + h/2)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundingBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    /// Builds a box, rejecting dimensions below one pixel or non-finite
    /// coordinates.
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Result<Self> {
        if !(cx.is_finite() && cy.is_finite() && w.is_finite() && h.is_finite()) {
            return Err(Error::Geometry("bounding box must be finite".into()));
        }
        if w < 1.0 || h < 1.0 {
            return Err(Error::Geometry(format!(
                "bounding box dimensions must be >= 1, got {w}x{h}"
            )));
        }
        Ok(BoundingBox { cx, cy, w, h })
    }

    pub fn left(&self) -> f64 {
        self.cx - self.w / 2.0
    }

    pub fn right(&self) -> f64 {
        self.cx + self.w / 2.0
    }

    pub fn top(&self) -> f64 {
        self.cy - self.h / 2.0
    }

    pub fn bottom(&self) -> f64 {
        self.cy + self.h / 2.0
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// Whether the full box extent lies inside a W×H image.
    pub fn inside(&self, width: usize, height: usize) -> bool {
        self.left() >= 0.0
            && self.top() >= 0.0
            && self.right() <= width as f64
            && self.bottom() <= height as f64
    }

    /// Integer pixel extent of the box: origin rounds to the nearest pixel,
    /// dimensions round independently so equal-sized boxes always rasterize
    /// to equal-sized extents.
    pub fn pixel_extent(&self) -> PixelRect {
        let w = self.w.round().max(1.0) as i64;
        let h = self.h.round().max(1.0) as i64;
        let x0 = self.left().round() as i64;
        let y0 = self.top().round() as i64;
        PixelRect {
            x0,
            y0,
            x1: x0 + w,
            y1: y0 + h,
        }
    }
}

/// Half-open integer pixel rectangle `[x0, x1) × [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl PixelRect {
    /// Clips to a W×H image; `None` when nothing remains.
    pub fn clamped(&self, width: usize, height: usize) -> Option<PixelRect> {
        let x0 = self.x0.max(0);
        let y0 = self.y0.max(0);
        let x1 = self.x1.min(width as i64);
        let y1 = self.y1.min(height as i64);
        if x0 < x1 && y0 < y1 {
            Some(PixelRect { x0, y0, x1, y1 })
        } else {
            None
        }
    }

    pub fn width(&self) -> i64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> i64 {
        self.y1 - self.y0
    }
}

/// Binary raster, one boolean per pixel, dimensions matching the frame (or
/// region) it was computed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Geometry(format!(
                "mask dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "mask has {} bits, expected {}",
                bits.len(),
                width * height
            )));
        }
        Ok(BinaryMask {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        BinaryMask::new(width, height, vec![false; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.width && y < self.height);
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        debug_assert!(x < self.width && y < self.height);
        self.bits[y * self.width + x] = value;
    }

    /// Out-of-bounds reads are background.
    #[inline]
    pub fn get_or_false(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            false
        } else {
            self.bits[y as usize * self.width + x as usize]
        }
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Renders as a black/white frame (set = 255) for inspection dumps.
    pub fn to_frame(&self) -> Frame {
        let data = self
            .bits
            .iter()
            .map(|&b| if b { 255.0 } else { 0.0 })
            .collect();
        Frame::new(self.width, self.height, data).expect("mask dims are valid frame dims")
    }
}

/// Extracts a rectangular patch; pixels outside the frame are filled by edge
/// replication. Output dimensions are the rounded region dimensions.
pub fn extract_patch(frame: &Frame, region: &BoundingBox) -> Frame {
    let rect = region.pixel_extent();
    let (w, h) = (rect.width() as usize, rect.height() as usize);
    let mut data = Vec::with_capacity(w * h);
    for y in rect.y0..rect.y1 {
        for x in rect.x0..rect.x1 {
            data.push(frame.get_replicated(x, y));
        }
    }
    Frame::new(w, h, data).expect("extent dims are >= 1")
}
