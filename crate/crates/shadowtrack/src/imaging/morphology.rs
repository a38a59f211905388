//! Binary erosion and dilation with the fixed 3×3 all-ones kernel.
//!
//! Out-of-bounds neighbors are background: erosion always clears pixels on
//! the image border, dilation never reaches outside it.

use super::BinaryMask;

/// Keeps a pixel iff all 9 pixels of its 3×3 neighborhood are set.
pub fn erode(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let mut out = BinaryMask::empty(w, h).expect("same dims as input");
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut keep = true;
            'kernel: for dy in -1..=1 {
                for dx in -1..=1 {
                    if !mask.get_or_false(x + dx, y + dy) {
                        keep = false;
                        break 'kernel;
                    }
                }
            }
            if keep {
                out.set(x as usize, y as usize, true);
            }
        }
    }
    out
}

/// Sets a pixel iff any of the 9 pixels of its 3×3 neighborhood is set.
pub fn dilate(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let mut out = BinaryMask::empty(w, h).expect("same dims as input");
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut hit = false;
            'kernel: for dy in -1..=1 {
                for dx in -1..=1 {
                    if mask.get_or_false(x + dx, y + dy) {
                        hit = true;
                        break 'kernel;
                    }
                }
            }
            if hit {
                out.set(x as usize, y as usize, true);
            }
        }
    }
    out
}
