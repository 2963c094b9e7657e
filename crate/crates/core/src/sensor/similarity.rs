//! Scene similarity used to decide when the robot has left the row.
//!
//! The reference scene is captured at state A: the part of the image below
//! the detected EOR line. The default scorer measures how much of the ground
//! strip just before the EOR (as seen at capture time) is still inside the
//! current camera footprint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_intersection, polygon_area, Pose2D, Vec2};
use crate::sensor::camera::CameraModel;
use crate::sensor::image::SegMask;
use crate::sensor::skeleton::{eor_ground_distance, EorDetection};

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceScene {
    /// Mask rows strictly below the EOR line; rows above are cleared.
    pub cropped: SegMask,
    pub camera_pose: Pose2D,
    /// Ground distance of the EOR line ahead of the camera at capture.
    pub eor_distance: f64,
    /// World-frame ground patch the geometric scorer tracks.
    pub region: Vec<Vec2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReferenceConfig {
    /// Depth of the tracked strip before the EOR line (m).
    pub band: f64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self { band: 0.02 }
    }
}

impl ReferenceScene {
    pub fn capture(
        mask: &SegMask,
        eor: &EorDetection,
        cam: &CameraModel,
        camera_pose: &Pose2D,
        cfg: &ReferenceConfig,
    ) -> Result<Self> {
        if !eor.valid {
            return Err(Error::State("reference scene needs a valid EOR detection".into()));
        }
        let eor_distance = eor_ground_distance(cam, eor)
            .ok_or_else(|| Error::DetectionUnavailable("EOR row above the horizon".into()))?;
        let mut cropped = mask.clone();
        for v in 0..=eor.image_row.min(mask.height() - 1) {
            for u in 0..mask.width() {
                cropped.set(u, v, false);
            }
        }

        // Strip as wide as the near edge of the view, so straight travel keeps
        // it fully visible until the near edge reaches it.
        let frame = cam.frame(&Pose2D::default());
        let footprint = cam.footprint(&frame)?;
        let near_half = (footprint[0].y).abs().min(footprint[3].y.abs());
        let near = (eor_distance - cfg.band).max(footprint[0].x);
        let local = [
            Vec2::new(near, -near_half),
            Vec2::new(eor_distance, -near_half),
            Vec2::new(eor_distance, near_half),
            Vec2::new(near, near_half),
        ];
        let region: Vec<Vec2> = local.iter().map(|&p| camera_pose.transform_point(p)).collect();
        let world_fp = cam.footprint(&cam.frame(camera_pose))?;
        let region = convex_intersection(&region, &world_fp);
        if polygon_area(&region) <= 0.0 {
            return Err(Error::DetectionUnavailable("reference region is empty".into()));
        }
        Ok(Self {
            cropped,
            camera_pose: *camera_pose,
            eor_distance,
            region,
        })
    }
}

/// Pluggable similarity between the reference scene and the current view.
pub trait SceneScorer: Send + Sync {
    /// Score in [0, 1]; 1 means the reference scene is fully in view.
    fn score(&self, reference: &ReferenceScene, camera_pose: &Pose2D) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct FootprintScorer {
    pub camera: CameraModel,
}

impl SceneScorer for FootprintScorer {
    fn score(&self, reference: &ReferenceScene, camera_pose: &Pose2D) -> f64 {
        let Ok(fp) = self.camera.footprint(&self.camera.frame(camera_pose)) else {
            return 0.0;
        };
        let total = polygon_area(&reference.region);
        if total <= 0.0 {
            return 0.0;
        }
        (polygon_area(&convex_intersection(&reference.region, &fp)) / total).clamp(0.0, 1.0)
    }
}

/// Convenience wrapper that fails when no reference was captured.
pub fn similarity_score(
    scorer: &dyn SceneScorer,
    reference: Option<&ReferenceScene>,
    camera_pose: &Pose2D,
) -> Result<f64> {
    let reference = reference.ok_or_else(|| Error::State("no reference scene captured".into()))?;
    Ok(scorer.score(reference, camera_pose))
}
