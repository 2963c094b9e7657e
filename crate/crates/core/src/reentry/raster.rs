//! Integer line rasterization for pixel sums.
//!
//! Endpoints are put in a canonical order (smaller v first, then smaller u)
//! before stepping, so a segment and its reverse cover the same pixels and a
//! horizontally mirrored segment covers the mirrored pixels. Midpoint ties
//! round toward the canonical start.

use crate::sensor::image::SegMask;

pub type Px = (i64, i64);

fn canonical(a: Px, b: Px) -> (Px, Px) {
    if (a.1, a.0) <= (b.1, b.0) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Visits every pixel of the rasterized segment `a`-`b` once.
pub fn for_each_pixel(a: Px, b: Px, mut f: impl FnMut(i64, i64)) {
    let (p, q) = canonical(a, b);
    let (dx, dy) = ((q.0 - p.0).abs(), (q.1 - p.1).abs());
    let (sx, sy) = ((q.0 - p.0).signum(), (q.1 - p.1).signum());
    let (mut x, mut y) = p;
    if dx >= dy {
        let mut d = 2 * dy - dx;
        for _ in 0..=dx {
            f(x, y);
            if d > 0 {
                y += sy;
                d -= 2 * dx;
            }
            d += 2 * dy;
            x += sx;
        }
    } else {
        let mut d = 2 * dx - dy;
        for _ in 0..=dy {
            f(x, y);
            if d > 0 {
                x += sx;
                d -= 2 * dy;
            }
            d += 2 * dx;
            y += sy;
        }
    }
}

pub fn line_pixels(a: Px, b: Px) -> Vec<Px> {
    let mut out = Vec::new();
    for_each_pixel(a, b, |x, y| out.push((x, y)));
    out
}

/// Number of set mask pixels on the segment; out-of-image pixels count 0.
pub fn line_sum(mask: &SegMask, a: Px, b: Px) -> u32 {
    let mut sum = 0;
    for_each_pixel(a, b, |x, y| sum += mask.value(x, y));
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_included_once() {
        let px = line_pixels((0, 0), (5, 2));
        assert_eq!(px.len(), 6);
        assert_eq!(px[0], (0, 0));
        assert_eq!(px[5], (5, 2));
    }

    #[test]
    fn reverse_is_same_set() {
        let mut a = line_pixels((3, 9), (-4, 1));
        let mut b = line_pixels((-4, 1), (3, 9));
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn tie_rounds_toward_top() {
        assert_eq!(line_pixels((0, 0), (4, 1)), vec![(0, 0), (1, 0), (2, 0), (3, 1), (4, 1)]);
        assert_eq!(line_pixels((0, 0), (-4, 1)), vec![(0, 0), (-1, 0), (-2, 0), (-3, 1), (-4, 1)]);
    }
}
