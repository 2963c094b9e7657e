use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reentry::raster::Px;
use crate::reentry::Turn;
use crate::sensor::image::SegMask;
use crate::sensor::skeleton::{central_trace, column_at_row, EorConfig, EorDetection};

/// Scan region on the turn side of the central row.
///
/// `a` is where the central row's image line leaves the top border (close to
/// the rows' vanishing point), `b` where it meets the bottom border (the
/// anchor called C for right turns). `l1`/`l2` are the top and bottom image
/// corners on the turn side and `l3` only labels the bottom edge between
/// `l2` and `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRoi {
    pub side: Turn,
    pub a: Px,
    pub b: Px,
    pub l1: Px,
    pub l2: Px,
    pub l3: Px,
    /// L1 -> L2 down the side edge, then L2 -> B along the bottom edge.
    pub corner_path: Vec<Px>,
    /// A -> L1 along the top border.
    pub top_segment: Vec<Px>,
}

/// Rounds a column with ties broken toward the image centre, which keeps
/// rounding exact under horizontal mirroring.
fn round_column(u: f64, width: u32) -> i64 {
    let half = (width as f64 - 1.0) / 2.0;
    let r = if u < half { (u + 0.5).floor() } else { (u - 0.5).ceil() };
    (r as i64).clamp(0, width as i64 - 1)
}

pub fn build_roi(mask: &SegMask, eor: &EorDetection, turn: Turn) -> Result<ScanRoi> {
    build_roi_with(mask, eor, turn, &EorConfig::default())
}

pub fn build_roi_with(mask: &SegMask, eor: &EorDetection, turn: Turn, cfg: &EorConfig) -> Result<ScanRoi> {
    if !eor.valid {
        return Err(Error::DetectionUnavailable("no valid EOR line".into()));
    }
    let trace = central_trace(mask, cfg)
        .ok_or_else(|| Error::DetectionUnavailable("no central row skeleton".into()))?;
    let (w, h) = (mask.width(), mask.height());
    let bottom = h as i64 - 1;
    let top_u = column_at_row(&trace.line, 0.0)
        .ok_or_else(|| Error::DetectionUnavailable("central row is horizontal".into()))?;
    let bottom_u = column_at_row(&trace.line, bottom as f64)
        .ok_or_else(|| Error::DetectionUnavailable("central row is horizontal".into()))?;
    let a = (round_column(top_u, w), 0);
    let b = (round_column(bottom_u, w), bottom);

    let edge = match turn {
        Turn::Left => 0,
        Turn::Right => w as i64 - 1,
    };
    let step = match turn {
        Turn::Left => 1,
        Turn::Right => -1,
    };
    let (l1, l2) = ((edge, 0), (edge, bottom));
    let l3 = (round_column((edge + b.0) as f64 / 2.0, w), bottom);

    let mut corner_path: Vec<Px> = (0..=bottom).map(|v| (edge, v)).collect();
    let mut u = edge;
    while u != b.0 && (b.0 - u) * step > 0 {
        u += step;
        corner_path.push((u, bottom));
    }
    let mut top_segment = vec![a];
    let mut u = a.0;
    while u != edge {
        u -= step;
        top_segment.push((u, 0));
    }
    Ok(ScanRoi {
        side: turn,
        a,
        b,
        l1,
        l2,
        l3,
        corner_path,
        top_segment,
    })
}

impl ScanRoi {
    /// Quadrilateral A, L1, L2, B.
    pub fn polygon(&self) -> [Px; 4] {
        [self.a, self.l1, self.l2, self.b]
    }

    /// Whether `p` lies inside or on the boundary of the ROI quadrilateral.
    pub fn contains(&self, p: Px) -> bool {
        let poly = self.polygon();
        let mut sign = 0i64;
        for i in 0..4 {
            let (a, b) = (poly[i], poly[(i + 1) % 4]);
            let z = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if z == 0 {
                continue;
            }
            if sign == 0 {
                sign = z.signum();
            } else if z.signum() != sign {
                return false;
            }
        }
        true
    }

    pub fn mirrored(&self, width: u32) -> Self {
        let m = |p: Px| (width as i64 - 1 - p.0, p.1);
        Self {
            side: self.side.opposite(),
            a: m(self.a),
            b: m(self.b),
            l1: m(self.l1),
            l2: m(self.l2),
            l3: m(self.l3),
            corner_path: self.corner_path.iter().map(|&p| m(p)).collect(),
            top_segment: self.top_segment.iter().map(|&p| m(p)).collect(),
        }
    }
}
