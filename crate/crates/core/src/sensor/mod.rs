//! Synthetic camera: skeleton mask and depth rendering, EOR detection and
//! scene similarity.

pub mod camera;
pub mod image;
pub mod render;
pub mod similarity;
pub mod skeleton;

pub use camera::{CameraFrame, CameraModel, Vec3};
pub use image::{check_dimensions, DepthImage, Intrinsics, SegMask, DEFAULT_DEPTH_SCALE};
pub use render::{apply_mask_noise, render, render_depth, render_mask, MaskNoise};
pub use similarity::{similarity_score, FootprintScorer, ReferenceConfig, ReferenceScene, SceneScorer};
pub use skeleton::{central_trace, components, detect_eor, detect_eor_with, eor_ground_distance, CentralTrace, Component, EorConfig, EorDetection};
