//! Ground-truth projection of planted row segments into a skeleton mask and
//! an aligned depth image.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::FieldSpec;
use crate::geometry::{point_segment_distance, Pose2D, Vec2};
use crate::sensor::camera::{CameraFrame, CameraModel};
use crate::sensor::image::{DepthImage, SegMask};

/// Mask pixels whose ground back-projection strays further than this from
/// the planted segment are dropped.
pub const ROUND_TRIP_TOLERANCE: f64 = 0.01;

const NEAR_CLIP: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MaskNoise {
    /// Per-pixel salt/pepper flip probability.
    pub flip_probability: f64,
    pub dilation: u32,
}

/// Renders the skeleton mask and depth image seen from `camera_pose`.
pub fn render(field: &FieldSpec, camera_pose: &Pose2D, cam: &CameraModel) -> Result<(SegMask, DepthImage)> {
    let mask = render_mask(field, camera_pose, cam)?;
    Ok((mask, render_depth(cam)?))
}

pub fn render_mask(field: &FieldSpec, camera_pose: &Pose2D, cam: &CameraModel) -> Result<SegMask> {
    cam.validate()?;
    let frame = cam.frame(camera_pose);
    // Same arithmetic as `ground_distance_of_row`, without recomputing the frame.
    let level = cam.frame(&Pose2D::default());
    let mut mask = SegMask::new(cam.width, cam.height);
    for row in &field.rows {
        for (a, b) in row.planted_segments() {
            draw_segment(&mut mask, cam, &frame, &level, a, b);
        }
    }
    Ok(mask)
}

/// Flat-ground depth (optical-axis z) per pixel; 0 above the horizon or past
/// `max_range`. Pitch and height fix it, so it does not depend on pose.
pub fn render_depth(cam: &CameraModel) -> Result<DepthImage> {
    cam.validate()?;
    let frame = cam.frame(&Pose2D::default());
    let mut depth = DepthImage::new(cam.width, cam.height);
    for v in 0..cam.height {
        let Some((p, z)) = cam.ground_point(&frame, cam.cx, v as f64) else {
            continue;
        };
        if p.x > cam.max_range {
            continue;
        }
        for u in 0..cam.width {
            depth.set(u, v, z);
        }
    }
    Ok(depth)
}

pub fn apply_mask_noise<R: Rng + ?Sized>(mask: &mut SegMask, noise: &MaskNoise, rng: &mut R) {
    if noise.dilation > 0 {
        *mask = mask.dilated(noise.dilation);
    }
    let p = noise.flip_probability;
    if !(p > 0.0) {
        return;
    }
    let total = mask.width() as u64 * mask.height() as u64;
    if p >= 1.0 {
        for i in 0..total {
            flip(mask, i);
        }
        return;
    }
    let skip = Geometric::new(p).expect("valid probability");
    let mut i = skip.sample(rng);
    while i < total {
        flip(mask, i);
        i = i.saturating_add(1 + skip.sample(rng));
    }
}

fn flip(mask: &mut SegMask, i: u64) {
    let w = mask.width() as u64;
    let (u, v) = ((i % w) as u32, (i / w) as u32);
    let on = mask.get(u, v);
    mask.set(u, v, !on);
}

fn draw_segment(mask: &mut SegMask, cam: &CameraModel, frame: &CameraFrame, level: &CameraFrame, a: Vec2, b: Vec2) {
    let (da, db) = (frame.ahead(a), frame.ahead(b));
    let Some((t0, t1)) = clip_interval(da, db, NEAR_CLIP, cam.max_range) else {
        return;
    };
    let (p0, p1) = (a + (b - a) * t0, a + (b - a) * t1);
    let project = |p: Vec2| cam.project(frame, crate::sensor::camera::Vec3::new(p.x, p.y, 0.0));
    let (Some(q0), Some(q1)) = (project(p0), project(p1)) else {
        return;
    };
    let (w, h) = (cam.width as f64, cam.height as f64);
    let Some((q0, q1)) = clip_to_rect(q0, q1, (-0.5, -0.5), (w - 0.5, h - 0.5)) else {
        return;
    };

    let mut candidates = Vec::new();
    let (du, dv) = (q1.0 - q0.0, q1.1 - q0.1);
    if du.abs() < 1e-12 && dv.abs() < 1e-12 {
        candidates.push((q0.0.round(), q0.1.round()));
    } else if du.abs() >= dv.abs() {
        let (lo, hi) = (q0.0.min(q1.0), q0.0.max(q1.0));
        for u in (lo.ceil() as i64)..=(hi.floor() as i64) {
            let v = q0.1 + (u as f64 - q0.0) * dv / du;
            candidates.push((u as f64, v.round()));
        }
    } else {
        let (lo, hi) = (q0.1.min(q1.1), q0.1.max(q1.1));
        for v in (lo.ceil() as i64)..=(hi.floor() as i64) {
            let u = q0.0 + (v as f64 - q0.1) * du / dv;
            candidates.push((u.round(), v as f64));
        }
    }

    for (u, v) in candidates {
        if !mask.in_bounds(u as i64, v as i64) {
            continue;
        }
        let Some((g, _)) = cam.ground_point(frame, u, v) else {
            continue;
        };
        if frame.ahead(g) > cam.max_range || cam.ground_point(level, cam.cx, v).map_or(true, |(d, _)| d.x > cam.max_range) {
            continue;
        }
        if point_segment_distance(g, a, b) <= ROUND_TRIP_TOLERANCE {
            mask.set(u as u32, v as u32, true);
        }
    }
}

/// Parameter sub-interval of [0, 1] where a linear function from `fa` to `fb`
/// stays inside [lo, hi].
fn clip_interval(fa: f64, fb: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    let d = fb - fa;
    for (bound, keep_above) in [(lo, true), (hi, false)] {
        if d.abs() < 1e-15 {
            let ok = if keep_above { fa >= bound } else { fa <= bound };
            if !ok {
                return None;
            }
            continue;
        }
        let t = (bound - fa) / d;
        let entering = (d > 0.0) == keep_above;
        if entering {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

/// Liang-Barsky clip of a 2D segment to an axis-aligned rectangle.
fn clip_to_rect(
    p: (f64, f64),
    q: (f64, f64),
    min: (f64, f64),
    max: (f64, f64),
) -> Option<((f64, f64), (f64, f64))> {
    let (tx0, tx1) = clip_interval(p.0, q.0, min.0, max.0)?;
    let (ty0, ty1) = clip_interval(p.1, q.1, min.1, max.1)?;
    let (t0, t1) = (tx0.max(ty0), tx1.min(ty1));
    if t0 > t1 {
        return None;
    }
    let at = |t: f64| (p.0 + (q.0 - p.0) * t, p.1 + (q.1 - p.1) * t);
    Some((at(t0), at(t1)))
}
