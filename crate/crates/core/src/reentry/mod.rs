//! Re-entry point detection: the ROI on the turn side, the two pixel-sum
//! scans, and the depth back-projection of their intersection with the EOR
//! line.

pub mod locate;
pub mod raster;
pub mod roi;
pub mod scan;

use serde::{Deserialize, Serialize};

pub use locate::{locate_reentry, overlay, ReentryResult};
pub use raster::{for_each_pixel, line_pixels, line_sum, Px};
pub use roi::{build_roi, build_roi_with, ScanRoi};
pub use scan::{joint_scan, scan_at, scan_mask, scan_pt, ScanHit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Turn {
    Left,
    Right,
}

impl Turn {
    /// +1 for left (counter-clockwise), -1 for right.
    pub fn sign(self) -> f64 {
        match self {
            Turn::Left => 1.0,
            Turn::Right => -1.0,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Turn::Left => Turn::Right,
            Turn::Right => Turn::Left,
        }
    }

    /// Index of the neighbouring row in this direction (rows count up to the left).
    pub fn target_row(self, row: usize, row_count: usize) -> Option<usize> {
        match self {
            Turn::Left => (row + 1 < row_count).then_some(row + 1),
            Turn::Right => row.checked_sub(1),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Turn::Left => "left",
            Turn::Right => "right",
        }
    }
}

impl std::str::FromStr for Turn {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "left" | "l" => Ok(Turn::Left),
            "right" | "r" => Ok(Turn::Right),
            other => Err(crate::Error::Argument(format!("unknown turn direction {other:?}"))),
        }
    }
}

impl std::fmt::Display for Turn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
