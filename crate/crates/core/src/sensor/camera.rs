use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Pose2D, Vec2};

pub type Vec3 = Vector3<f64>;

/// Pinhole camera pitched down over flat ground; mask and depth share it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraModel {
    pub width: u32,
    pub height: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// Optical centre height above ground (m).
    pub mount_height: f64,
    /// Downward tilt (deg).
    pub pitch_deg: f64,
    /// Ground points farther ahead than this are not rendered (m).
    pub max_range: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        // Pitch puts the horizon on the top image row, so row lines meet
        // their vanishing point at the upper border.
        Self {
            width: 640,
            height: 480,
            fx: 460.0,
            fy: 460.0,
            cx: 319.5,
            cy: 239.5,
            mount_height: 0.30,
            pitch_deg: 27.5,
            max_range: 8.0,
        }
    }
}

/// Camera axes placed in some planar frame (world or robot body), z up.
#[derive(Debug, Clone, Copy)]
pub struct CameraFrame {
    pub origin: Vec3,
    pub right: Vec3,
    pub down: Vec3,
    pub forward: Vec3,
}

impl CameraFrame {
    pub fn ground_position(&self) -> Vec2 {
        Vec2::new(self.origin.x, self.origin.y)
    }

    /// Unit heading of the optical axis projected on the ground.
    pub fn ground_heading(&self) -> Vec2 {
        Vec2::new(self.forward.x, self.forward.y).normalize()
    }

    pub fn to_camera(&self, p: Vec3) -> Vec3 {
        let q = p - self.origin;
        Vec3::new(q.dot(&self.right), q.dot(&self.down), q.dot(&self.forward))
    }

    pub fn from_camera(&self, c: Vec3) -> Vec3 {
        self.origin + self.right * c.x + self.down * c.y + self.forward * c.z
    }

    /// Forward ground distance of a ground point from the camera.
    pub fn ahead(&self, p: Vec2) -> f64 {
        (p - self.ground_position()).dot(&self.ground_heading())
    }
}

impl CameraModel {
    pub fn pitch(&self) -> f64 {
        self.pitch_deg.to_radians()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) || self.width == 0 || self.height == 0 {
            return Err(Error::Config("camera intrinsics must be positive".into()));
        }
        if !(self.mount_height > 0.0) {
            return Err(Error::Render("camera must be above the ground plane".into()));
        }
        if !(self.max_range > 0.0) {
            return Err(Error::Config("camera max_range must be positive".into()));
        }
        if self.ground_distance_of_row(self.height as f64 - 1.0).is_none() {
            return Err(Error::Render("camera does not see the ground".into()));
        }
        Ok(())
    }

    /// Camera axes for a camera located at planar `pose` (heading = optical axis yaw).
    pub fn frame(&self, pose: &Pose2D) -> CameraFrame {
        let (sp, cp) = self.pitch().sin_cos();
        let h = pose.heading();
        let l = pose.left();
        let heading = Vec3::new(h.x, h.y, 0.0);
        let left = Vec3::new(l.x, l.y, 0.0);
        let up = Vec3::new(0.0, 0.0, 1.0);
        CameraFrame {
            origin: Vec3::new(pose.x, pose.y, self.mount_height),
            right: -left,
            down: -heading * sp - up * cp,
            forward: heading * cp - up * sp,
        }
    }

    pub fn project(&self, frame: &CameraFrame, p: Vec3) -> Option<(f64, f64)> {
        let c = frame.to_camera(p);
        (c.z > 1e-9).then(|| (self.cx + self.fx * c.x / c.z, self.cy + self.fy * c.y / c.z))
    }

    /// Ray through pixel `(u, v)` scaled so its optical-axis component is 1.
    pub fn pixel_ray(&self, frame: &CameraFrame, u: f64, v: f64) -> Vec3 {
        frame.right * ((u - self.cx) / self.fx) + frame.down * ((v - self.cy) / self.fy) + frame.forward
    }

    /// Ground intersection of a pixel ray and its optical-axis depth.
    pub fn ground_point(&self, frame: &CameraFrame, u: f64, v: f64) -> Option<(Vec2, f64)> {
        let ray = self.pixel_ray(frame, u, v);
        if ray.z >= -1e-12 {
            return None;
        }
        let t = -frame.origin.z / ray.z;
        let p = frame.origin + ray * t;
        Some((Vec2::new(p.x, p.y), t))
    }

    /// Forward ground distance seen by image row `v` (independent of column).
    pub fn ground_distance_of_row(&self, v: f64) -> Option<f64> {
        let frame = self.frame(&Pose2D::default());
        self.ground_point(&frame, self.cx, v).map(|(p, _)| p.x)
    }

    /// Image row whose ground line lies `distance` ahead of the camera.
    pub fn row_of_ground_distance(&self, distance: f64) -> f64 {
        let below = (self.mount_height / distance).atan();
        self.cy - self.fy * (self.pitch() - below).tan()
    }

    /// Optical-axis depth -> camera-frame point.
    pub fn backproject(&self, u: f64, v: f64, depth: f64) -> Vec3 {
        Vec3::new(
            (u - self.cx) / self.fx * depth,
            (v - self.cy) / self.fy * depth,
            depth,
        )
    }

    /// Horizontal mirror of a pixel column.
    pub fn mirror_u(&self, u: f64) -> f64 {
        self.width as f64 - 1.0 - u
    }

    /// Ground footprint of the image, cut at `max_range` ahead, counter-clockwise.
    pub fn footprint(&self, frame: &CameraFrame) -> Result<Vec<Vec2>> {
        let bottom = self.height as f64 - 1.0;
        let right_col = self.width as f64 - 1.0;
        let near_l = self.ground_point(frame, 0.0, bottom);
        let near_r = self.ground_point(frame, right_col, bottom);
        let (Some((nl, _)), Some((nr, _))) = (near_l, near_r) else {
            return Err(Error::Render("camera does not see the ground".into()));
        };
        let top_dist = self.ground_distance_of_row(0.0).unwrap_or(f64::INFINITY);
        let far = top_dist.min(self.max_range);
        let far_row = self.row_of_ground_distance(far).max(0.0);
        let (Some((fl, _)), Some((fr, _))) = (
            self.ground_point(frame, 0.0, far_row),
            self.ground_point(frame, right_col, far_row),
        ) else {
            return Err(Error::Render("camera far edge misses the ground".into()));
        };
        Ok(vec![nr, fr, fl, nl])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn horizon_near_top_row() {
        let cam = CameraModel::default();
        let horizon = cam.cy - cam.fy * cam.pitch().tan();
        assert!(horizon.abs() < 0.5, "horizon at {horizon}");
    }

    #[test]
    fn project_and_ground_point_agree() {
        let cam = CameraModel::default();
        let frame = cam.frame(&Pose2D::new(1.0, 2.0, 0.3));
        let g = Vec2::new(2.5, 2.8);
        let (u, v) = cam.project(&frame, Vec3::new(g.x, g.y, 0.0)).unwrap();
        let (back, depth) = cam.ground_point(&frame, u, v).unwrap();
        assert_relative_eq!(back, g, epsilon = 1e-9);
        let c = cam.backproject(u, v, depth);
        let w = frame.from_camera(c);
        assert_relative_eq!(w.z, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn row_distance_inverse() {
        let cam = CameraModel::default();
        for d in [0.5, 1.0, 2.0, 5.0] {
            let v = cam.row_of_ground_distance(d);
            assert_relative_eq!(cam.ground_distance_of_row(v).unwrap(), d, epsilon = 1e-9);
        }
    }

    #[test]
    fn near_edge_default() {
        let cam = CameraModel::default();
        let near = cam.ground_distance_of_row(479.0).unwrap();
        assert_relative_eq!(near, 0.210, epsilon = 1e-3);
    }

    #[test]
    fn upward_camera_is_degenerate() {
        let cam = CameraModel {
            pitch_deg: -40.0,
            ..Default::default()
        };
        assert!(matches!(cam.validate(), Err(Error::Render(_))));
    }
}
