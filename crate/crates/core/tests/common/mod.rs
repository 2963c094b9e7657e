//! Brute-force references shared by the integration tests.
#![allow(dead_code)]

use rowswitch::reentry::Px;
use rowswitch::sensor::SegMask;

/// Pixel rows of a segment by direct rounding: along the major axis from the
/// endpoint with the smaller (v, u), minor offset rounded half toward the start.
pub fn oracle_pixels(a: Px, b: Px) -> Vec<Px> {
    let (p, q) = if (a.1, a.0) <= (b.1, b.0) { (a, b) } else { (b, a) };
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let (major, minor) = if dx.abs() >= dy.abs() { (dx, dy) } else { (dy, dx) };
    let n = major.abs();
    let ceil_div = |num: i64, den: i64| -((-num).div_euclid(den));
    (0..=n)
        .map(|i| {
            let k = if n == 0 { 0 } else { ceil_div(2 * minor.abs() * i - n, 2 * n) };
            let (s, t) = (major.signum() * i, minor.signum() * k);
            if dx.abs() >= dy.abs() {
                (p.0 + s, p.1 + t)
            } else {
                (p.0 + t, p.1 + s)
            }
        })
        .collect()
}

pub fn oracle_sum(mask: &SegMask, a: Px, b: Px) -> u32 {
    oracle_pixels(a, b).into_iter().map(|(u, v)| mask.value(u, v)).sum()
}

pub fn oracle_argmax(mask: &SegMask, fixed: Px, candidates: &[Px]) -> Option<Px> {
    let mut best: Option<(Px, u32)> = None;
    for &c in candidates {
        let s = oracle_sum(mask, fixed, c);
        if s > 0 && best.is_none_or(|(_, b)| s > b) {
            best = Some((c, s));
        }
    }
    best.map(|b| b.0)
}
