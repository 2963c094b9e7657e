use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Pose2D, Vec2};
use crate::reentry::raster::{for_each_pixel, Px};
use crate::reentry::roi::{build_roi, ScanRoi};
use crate::reentry::scan::{scan_at, scan_mask, scan_pt};
use crate::reentry::Turn;
use crate::sensor::camera::{CameraModel, Vec3};
use crate::sensor::image::{check_dimensions, DepthImage, SegMask};
use crate::sensor::skeleton::{central_trace, EorConfig, EorDetection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReentryResult {
    pub valid: bool,
    /// Why detection failed, when it did.
    pub reason: Option<String>,
    pub turn: Turn,
    pub eor_row: u32,
    pub r_px: [f64; 2],
    /// Re-entry point in the camera frame (x right, y down, z forward).
    pub r_3d: [f64; 3],
    /// Re-entry point on the ground in the camera's ground frame (x ahead, y left).
    pub r_ground: [f64; 2],
    /// Lateral distance to the re-entry point toward the turn side.
    pub d_r: f64,
    pub p_t: Px,
    pub a_t: Px,
    pub roi: Option<ScanRoi>,
}

impl ReentryResult {
    fn invalid(turn: Turn, eor: &EorDetection, reason: impl Into<String>) -> Self {
        Self {
            valid: false,
            reason: Some(reason.into()),
            turn,
            eor_row: eor.image_row,
            r_px: [0.0; 2],
            r_3d: [0.0; 3],
            r_ground: [0.0; 2],
            d_r: 0.0,
            p_t: (0, 0),
            a_t: (0, 0),
            roi: None,
        }
    }

    /// TOML summary. The ROI keeps its corner points; the per-pixel scan
    /// paths are dropped.
    pub fn to_toml(&self) -> String {
        let mut short = self.clone();
        if let Some(roi) = short.roi.as_mut() {
            roi.corner_path.clear();
            roi.top_segment.clear();
        }
        toml::to_string(&short).expect("result serializes")
    }
}

/// Full detector pipeline. Detection failures come back as `valid = false`;
/// only inconsistent inputs are errors.
pub fn locate_reentry(
    mask: &SegMask,
    depth: &DepthImage,
    eor: &EorDetection,
    cam: &CameraModel,
    turn: Turn,
) -> Result<ReentryResult> {
    check_dimensions(mask, depth, cam)?;
    match locate_inner(mask, depth, eor, cam, turn) {
        Ok(r) => Ok(r),
        Err(Error::DetectionUnavailable(reason)) => Ok(ReentryResult::invalid(turn, eor, reason)),
        Err(e) => Err(e),
    }
}

fn locate_inner(
    mask: &SegMask,
    depth: &DepthImage,
    eor: &EorDetection,
    cam: &CameraModel,
    turn: Turn,
) -> Result<ReentryResult> {
    let roi = build_roi(mask, eor, turn)?;
    let trace = central_trace(mask, &EorConfig::default())
        .ok_or_else(|| Error::DetectionUnavailable("no central row skeleton".into()))?;
    let scanned = scan_mask(mask, &trace, 1);
    let p_t = scan_pt(&scanned, roi.a, &roi)?.point;
    let a_t = scan_at(&scanned, p_t, &roi)?.point;
    let unavailable = |msg: &str| Error::DetectionUnavailable(msg.into());
    if a_t.1 == p_t.1 {
        return Err(unavailable("scan line parallel to the EOR line"));
    }
    let v = eor.image_row as f64;
    let s = (v - a_t.1 as f64) / (p_t.1 - a_t.1) as f64;
    let u = a_t.0 as f64 + s * (p_t.0 - a_t.0) as f64;
    if !(u > -0.5 && u < mask.width() as f64 - 0.5) {
        return Err(unavailable("re-entry point outside the image"));
    }
    let z = depth.get(u.round() as u32, eor.image_row);
    let mut result = ReentryResult::invalid(turn, eor, "");
    result.roi = Some(roi);
    result.p_t = p_t;
    result.a_t = a_t;
    result.r_px = [u, v];
    if !(z > 0.0) {
        result.reason = Some("no depth at the re-entry point".into());
        return Ok(result);
    }
    let c = cam.backproject(u, v, z);
    let ground = cam.frame(&Pose2D::default()).from_camera(c);
    result.r_3d = [c.x, c.y, c.z];
    result.r_ground = [ground.x, ground.y];
    result.d_r = ground.y * turn.sign();
    if !(result.d_r > 0.0) {
        result.reason = Some("re-entry point not on the turn side".into());
        return Ok(result);
    }
    result.valid = true;
    result.reason = None;
    Ok(result)
}

impl ReentryResult {
    pub fn r_3d_vec(&self) -> Vec3 {
        Vec3::new(self.r_3d[0], self.r_3d[1], self.r_3d[2])
    }

    pub fn r_ground_vec(&self) -> Vec2 {
        Vec2::new(self.r_ground[0], self.r_ground[1])
    }
}

/// Mask in grey, ROI outline in blue, EOR row in green, the A_t-P_t line in
/// red and R as a yellow cross.
pub fn overlay(mask: &SegMask, eor: &EorDetection, result: &ReentryResult) -> RgbImage {
    let (w, h) = (mask.width(), mask.height());
    let mut img = RgbImage::from_fn(w, h, |u, v| {
        if mask.get(u, v) {
            Rgb([200, 200, 200])
        } else {
            Rgb([0, 0, 0])
        }
    });
    let mut put = |x: i64, y: i64, c: Rgb<u8>| {
        if x >= 0 && y >= 0 && x < w as i64 && y < h as i64 {
            img.put_pixel(x as u32, y as u32, c);
        }
    };
    if eor.valid {
        for u in 0..w as i64 {
            put(u, eor.image_row as i64, Rgb([0, 200, 0]));
        }
    }
    if let Some(roi) = &result.roi {
        let poly = roi.polygon();
        for i in 0..4 {
            for_each_pixel(poly[i], poly[(i + 1) % 4], |x, y| put(x, y, Rgb([40, 90, 255])));
        }
        for_each_pixel(result.a_t, result.p_t, |x, y| put(x, y, Rgb([255, 0, 0])));
    }
    if result.valid {
        let (ru, rv) = (result.r_px[0].round() as i64, result.r_px[1].round() as i64);
        for d in -4..=4 {
            put(ru + d, rv, Rgb([255, 230, 0]));
            put(ru, rv + d, Rgb([255, 230, 0]));
        }
    }
    img
}
