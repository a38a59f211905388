//! Frame I/O: 8-bit grayscale/RGB PNG, binary PGM (P5), and the
//! `frame_NNNNNN.(png|pgm)` sequence convention.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::Frame;
use crate::{Error, Result};

/// Rec. 601 luma weights used for RGB → intensity conversion.
const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// On-disk frame encodings understood by the sequence reader/writer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Pgm,
}

impl ImageFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Pgm => "pgm",
        }
    }

    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext.to_ascii_lowercase().as_str() {
            "png" => Some(ImageFormat::Png),
            "pgm" => Some(ImageFormat::Pgm),
            _ => None,
        }
    }
}

/// Loads a frame from an 8-bit grayscale or RGB image. RGB converts to luma
/// with the fixed Rec. 601 weights, so intensities stay real-valued.
pub fn load_frame(path: impl AsRef<Path>) -> Result<Frame> {
    let path = path.as_ref();
    let format = path
        .extension()
        .and_then(|e| e.to_str())
        .and_then(ImageFormat::from_extension)
        .ok_or_else(|| Error::UnsupportedImage {
            path: path.to_path_buf(),
            reason: "expected a .png or .pgm file".into(),
        })?;
    match format {
        ImageFormat::Png => load_png(path),
        ImageFormat::Pgm => load_pgm(path),
    }
}

/// Writes a frame, quantizing intensities to 8 bits.
pub fn save_frame(frame: &Frame, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    let path = path.as_ref();
    match format {
        ImageFormat::Png => image::save_buffer(
            path,
            &frame.to_u8(),
            frame.width() as u32,
            frame.height() as u32,
            image::ExtendedColorType::L8,
        )
        .map_err(|e| Error::UnsupportedImage {
            path: path.to_path_buf(),
            reason: format!("png encode failed: {e}"),
        }),
        ImageFormat::Pgm => save_pgm(frame, path),
    }
}

fn load_png(path: &Path) -> Result<Frame> {
    let img = image::open(path).map_err(|e| Error::UnsupportedImage {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let data: Vec<f64> = match img {
        image::DynamicImage::ImageLuma8(buf) => buf.into_raw().iter().map(|&v| v as f64).collect(),
        image::DynamicImage::ImageRgb8(buf) => {
            buf.pixels().map(|p| luma(p.0[0], p.0[1], p.0[2])).collect()
        }
        other => {
            return Err(Error::UnsupportedImage {
                path: path.to_path_buf(),
                reason: format!(
                    "unsupported pixel layout {:?}; expected 8-bit grayscale or RGB",
                    other.color()
                ),
            })
        }
    };
    Frame::new(w, h, data)
}

#[inline]
fn luma(r: u8, g: u8, b: u8) -> f64 {
    LUMA_WEIGHTS[0] * r as f64 + LUMA_WEIGHTS[1] * g as f64 + LUMA_WEIGHTS[2] * b as f64
}

/// Parses binary PGM (P5). Comments and arbitrary header whitespace are
/// accepted; a maxval above 255 is rejected as an unsupported bit depth.
pub fn parse_pgm(bytes: &[u8], origin: &Path) -> Result<Frame> {
    let bad = |reason: &str| Error::UnsupportedImage {
        path: origin.to_path_buf(),
        reason: reason.into(),
    };

    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err(bad("missing P5 magic; only binary PGM is supported"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // Skip whitespace and '#' comment lines between header tokens.
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated PGM header"));
        }
        let token = std::str::from_utf8(&bytes[start..pos]).expect("digits are utf8");
        *field = token.parse().map_err(|_| bad("header value overflow"))?;
    }
    let [width, height, maxval] = fields;
    if maxval > 255 {
        return Err(bad(&format!(
            "maxval {maxval} implies more than 8 bits per sample"
        )));
    }
    if maxval == 0 {
        return Err(bad("maxval must be positive"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("missing raster separator"));
    }
    pos += 1;
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| bad("image dimensions overflow"))?;
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(bad(&format!(
            "raster holds {} bytes, expected {expected}",
            raster.len()
        )));
    }
    let data = raster[..expected].iter().map(|&v| v as f64).collect();
    Frame::new(width, height, data)
}

fn load_pgm(path: &Path) -> Result<Frame> {
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes, path)
}

fn save_pgm(frame: &Frame, path: &Path) -> Result<()> {
    let mut out = Vec::with_capacity(frame.width() * frame.height() + 32);
    write!(out, "P5\n{} {}\n255\n", frame.width(), frame.height()).expect("vec write");
    out.extend_from_slice(&frame.to_u8());
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// File name for the frame at `index`: `frame_000042.png` and so on.
pub fn frame_filename(index: usize, format: ImageFormat) -> String {
    format!("frame_{:06}.{}", index, format.extension())
}

/// Lists the frame sequence in a directory: every `frame_*.png` / `frame_*.pgm`
/// file, sorted lexicographically (which sorts the zero-padded indices
/// numerically).
pub fn list_frames(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut frames = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let name = match path.file_name().and_then(|n| n.to_str()) {
            Some(n) => n,
            None => continue,
        };
        let is_frame = name.starts_with("frame_")
            && path
                .extension()
                .and_then(|e| e.to_str())
                .and_then(ImageFormat::from_extension)
                .is_some();
        if is_frame {
            frames.push(path);
        }
    }
    frames.sort();
    Ok(frames)
}
