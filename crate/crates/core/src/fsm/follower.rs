//! Geometric stand-in for the in-row navigation framework: row lines are
//! recovered from the skeleton mask on flat ground and tracked with a
//! proportional controller on lateral offset and heading.

use serde::{Deserialize, Serialize};

use crate::geometry::{fit_line, Line2, Pose2D, Vec2};
use crate::sensor::camera::{CameraFrame, CameraModel};
use crate::sensor::image::SegMask;
use crate::sensor::skeleton::components;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FollowerGains {
    /// rad/s per metre of lateral offset.
    pub k_offset: f64,
    /// rad/s per rad of heading error.
    pub k_heading: f64,
    pub omega_max: f64,
    /// Rows more oblique than this (deg) are ignored.
    pub max_row_angle_deg: f64,
    pub min_pixels: usize,
}

impl Default for FollowerGains {
    fn default() -> Self {
        Self {
            k_offset: 2.0,
            k_heading: 1.5,
            omega_max: 0.5,
            max_row_angle_deg: 60.0,
            min_pixels: 8,
        }
    }
}

/// A row line in the robot body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowEstimate {
    /// Lateral position of the row where it crosses the body y axis (left +).
    pub offset: f64,
    /// Row direction relative to the robot heading (left +).
    pub heading: f64,
}

impl RowEstimate {
    pub fn from_line(line: &Line2) -> Option<Self> {
        let mut d = line.direction;
        if d.x < 0.0 {
            d = -d;
        }
        if d.x.abs() < 1e-9 {
            return None;
        }
        let heading = d.y.atan2(d.x);
        let offset = line.point.y - line.point.x * d.y / d.x;
        Some(Self { offset, heading })
    }

    /// The same row seen from another body pose, both expressed in a common
    /// (odometry) world frame.
    pub fn reexpress(&self, from: &Pose2D, to: &Pose2D) -> Self {
        let p = from.transform_point(Vec2::new(0.0, self.offset));
        let theta = from.theta + self.heading;
        let q = to.inverse_transform_point(p);
        let h = crate::geometry::wrap_angle(theta - to.theta);
        let line = Line2 {
            point: q,
            direction: Vec2::new(h.cos(), h.sin()),
        };
        Self::from_line(&line).unwrap_or(*self)
    }

    /// Perpendicular distance from the robot to the row.
    pub fn distance(&self) -> f64 {
        self.offset * self.heading.cos()
    }
}

pub fn steer(row: &RowEstimate, gains: &FollowerGains) -> f64 {
    (gains.k_offset * row.offset + gains.k_heading * row.heading).clamp(-gains.omega_max, gains.omega_max)
}

/// Back-projects mask pixels onto the ground, in the body frame of a camera
/// frame built from the mount pose.
pub fn ground_points(pixels: &[(u32, u32)], cam: &CameraModel, body_frame: &CameraFrame) -> Vec<Vec2> {
    pixels
        .iter()
        .filter_map(|&(u, v)| cam.ground_point(body_frame, u as f64, v as f64).map(|(p, _)| p))
        .collect()
}

pub fn estimate_from_pixels(
    pixels: &[(u32, u32)],
    cam: &CameraModel,
    body_frame: &CameraFrame,
) -> Option<RowEstimate> {
    let pts = ground_points(pixels, cam, body_frame);
    RowEstimate::from_line(&fit_line(&pts)?)
}

/// Every row-like component in view, as body-frame row estimates.
pub fn row_candidates(
    mask: &SegMask,
    cam: &CameraModel,
    body_frame: &CameraFrame,
    gains: &FollowerGains,
) -> Vec<RowEstimate> {
    let limit = gains.max_row_angle_deg.to_radians();
    components(mask, gains.min_pixels)
        .iter()
        .filter_map(|c| estimate_from_pixels(&c.pixels, cam, body_frame))
        .filter(|r| r.heading.abs() < limit)
        .collect()
}

/// Locks onto one row and follows it by continuity, so crossing a mid-line
/// does not switch the target.
#[derive(Debug, Clone, Default)]
pub struct RowTracker {
    track: Option<(RowEstimate, Pose2D)>,
}

impl RowTracker {
    pub fn is_locked(&self) -> bool {
        self.track.is_some()
    }

    /// `est` is the odometric pose the candidates were observed from.
    pub fn update(&mut self, candidates: &[RowEstimate], est: &Pose2D, gate: f64) -> Option<RowEstimate> {
        let chosen = match self.track {
            None => candidates
                .iter()
                .min_by(|a, b| a.offset.abs().total_cmp(&b.offset.abs()))
                .copied(),
            Some((row, seen_from)) => {
                let predicted = row.reexpress(&seen_from, est);
                candidates
                    .iter()
                    .filter(|c| (c.offset - predicted.offset).abs() <= gate)
                    .min_by(|a, b| (a.offset - predicted.offset).abs().total_cmp(&(b.offset - predicted.offset).abs()))
                    .copied()
            }
        };
        if let Some(c) = chosen {
            self.track = Some((c, *est));
        }
        chosen
    }

    /// Last tracked row re-expressed at `est`, for coasting without a detection.
    pub fn predicted(&self, est: &Pose2D) -> Option<RowEstimate> {
        self.track.map(|(row, from)| row.reexpress(&from, est))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn estimate_of_offset_row() {
        let line = Line2 {
            point: Vec2::new(2.0, 0.3),
            direction: Vec2::new(-1.0, 0.0),
        };
        let r = RowEstimate::from_line(&line).unwrap();
        assert_relative_eq!(r.offset, 0.3);
        assert_relative_eq!(r.heading, 0.0);
        assert!(steer(&r, &FollowerGains::default()) > 0.0);
    }

    #[test]
    fn reexpress_after_sideways_shift() {
        let r = RowEstimate { offset: 0.3, heading: 0.0 };
        let moved = r.reexpress(&Pose2D::default(), &Pose2D::new(1.0, 0.1, 0.0));
        assert_relative_eq!(moved.offset, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn tracker_keeps_row_across_midline() {
        let mut t = RowTracker::default();
        let a = RowEstimate { offset: 0.2, heading: 0.0 };
        let b = RowEstimate { offset: -0.3, heading: 0.0 };
        assert_eq!(t.update(&[a, b], &Pose2D::default(), 0.25), Some(a));
        // Past the mid-line the other row is nearer, but the lock holds.
        let est = Pose2D::new(0.5, -0.1, 0.0);
        let a2 = RowEstimate { offset: 0.3, heading: 0.0 };
        let b2 = RowEstimate { offset: -0.2, heading: 0.0 };
        assert_eq!(t.update(&[b2, a2], &est, 0.25), Some(a2));
    }
}
