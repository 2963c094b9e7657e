use crate::error::{Error, Result};
use crate::reentry::raster::{line_sum, Px};
use crate::reentry::roi::ScanRoi;
use crate::sensor::image::SegMask;
use crate::sensor::skeleton::CentralTrace;

/// Copy of `mask` without the central row, so the scans only see rows on
/// the turn side. Pixels within `margin` columns of the trace are cleared.
pub fn scan_mask(mask: &SegMask, trace: &CentralTrace, margin: u32) -> SegMask {
    let mut out = mask.clone();
    for &(u, v) in &trace.pixels {
        let lo = u.saturating_sub(margin);
        let hi = (u + margin).min(mask.width() - 1);
        for x in lo..=hi {
            out.set(x, v, false);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanHit {
    pub point: Px,
    pub sum: u32,
}

fn argmax(mask: &SegMask, fixed: Px, candidates: &[Px]) -> Result<ScanHit> {
    let mut best = ScanHit { point: fixed, sum: 0 };
    for &p in candidates {
        let s = line_sum(mask, fixed, p);
        if s > best.sum {
            best = ScanHit { point: p, sum: s };
        }
    }
    if best.sum == 0 {
        return Err(Error::DetectionUnavailable("no skeleton pixels on the turn side".into()));
    }
    Ok(best)
}

/// P_t: the corner-path point whose segment from `a` covers the most mask
/// pixels; the first maximum in path order wins.
pub fn scan_pt(mask: &SegMask, a: Px, roi: &ScanRoi) -> Result<ScanHit> {
    argmax(mask, a, &roi.corner_path)
}

/// A_t: the top-segment point whose segment to `p_t` covers the most pixels.
pub fn scan_at(mask: &SegMask, p_t: Px, roi: &ScanRoi) -> Result<ScanHit> {
    argmax(mask, p_t, &roi.top_segment)
}

/// Exhaustive argmax over every (top-segment, corner-path) pair. Diagnostic
/// only; the detector uses the two sequential scans.
pub fn joint_scan(mask: &SegMask, roi: &ScanRoi) -> Option<(Px, Px, u32)> {
    let mut best: Option<(Px, Px, u32)> = None;
    for &a in &roi.top_segment {
        for &p in &roi.corner_path {
            let s = line_sum(mask, a, p);
            if best.map_or(s > 0, |b| s > b.2) {
                best = Some((a, p, s));
            }
        }
    }
    best
}
