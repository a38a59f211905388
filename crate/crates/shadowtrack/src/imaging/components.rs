//! Connected-component labeling on binary masks (8-connectivity).

use super::{BinaryMask, BoundingBox};

/// One connected blob of set pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    /// Number of member pixels.
    pub pixel_count: usize,
    /// Mean of member pixel centers, sub-pixel.
    pub centroid: (f64, f64),
    /// Tight box around the member pixels.
    pub bbox: BoundingBox,
}

/// Labels every set pixel with 8-connectivity; each set pixel belongs to
/// exactly one component. Components come out in scan order of their first
/// pixel, so the result is deterministic.
pub fn connected_components(mask: &BinaryMask) -> Vec<Component> {
    let (w, h) = (mask.width(), mask.height());
    let mut visited = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();

    for start in 0..w * h {
        if !mask.bits()[start] || visited[start] {
            continue;
        }
        visited[start] = true;
        stack.push(start);

        let mut count = 0usize;
        let mut sum_x = 0.0;
        let mut sum_y = 0.0;
        let (mut min_x, mut min_y) = (w, h);
        let (mut max_x, mut max_y) = (0usize, 0usize);

        while let Some(idx) = stack.pop() {
            let x = idx % w;
            let y = idx / w;
            count += 1;
            sum_x += x as f64 + 0.5;
            sum_y += y as f64 + 0.5;
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);

            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let nidx = ny as usize * w + nx as usize;
                    if mask.bits()[nidx] && !visited[nidx] {
                        visited[nidx] = true;
                        stack.push(nidx);
                    }
                }
            }
        }

        let bw = (max_x - min_x + 1) as f64;
        let bh = (max_y - min_y + 1) as f64;
        let bbox = BoundingBox::new(min_x as f64 + bw / 2.0, min_y as f64 + bh / 2.0, bw, bh)
            .expect("component extent is at least 1x1");
        out.push(Component {
            pixel_count: count,
            centroid: (sum_x / count as f64, sum_y / count as f64),
            bbox,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(width: usize, height: usize, set: &[(usize, usize)]) -> BinaryMask {
        let mut m = BinaryMask::empty(width, height).unwrap();
        for &(x, y) in set {
            m.set(x, y, true);
        }
        m
    }

    #[test]
    fn empty_mask_has_no_components() {
        let m = BinaryMask::empty(10, 10).unwrap();
        assert!(connected_components(&m).is_empty());
    }

    #[test]
    fn diagonal_pixels_join_under_8_connectivity() {
        let m = mask_from(4, 4, &[(1, 1), (2, 2)]);
        let comps = connected_components(&m);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].pixel_count, 2);
        assert_eq!(comps[0].centroid, (2.0, 2.0));
    }

    #[test]
    fn two_blocks_with_two_pixel_gap_stay_separate() {
        let mut set = Vec::new();
        for y in 2..7 {
            for x in 1..6 {
                set.push((x, y));
            }
            for x in 8..13 {
                set.push((x, y));
            }
        }
        let m = mask_from(16, 10, &set);
        let comps = connected_components(&m);
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.pixel_count == 25));
    }

    #[test]
    fn centroid_lies_inside_bbox() {
        let m = mask_from(8, 8, &[(1, 1), (2, 1), (1, 2), (5, 6), (6, 6)]);
        for c in connected_components(&m) {
            assert!(c.centroid.0 >= c.bbox.left() && c.centroid.0 <= c.bbox.right());
            assert!(c.centroid.1 >= c.bbox.top() && c.centroid.1 <= c.bbox.bottom());
        }
    }
}
