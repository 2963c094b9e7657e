//! Mask and depth rasters plus their portable-graymap file format.
//!
//! Masks are 8-bit PGM (nonzero = skeleton). Depth is 16-bit PGM in
//! millimetres, 0 = invalid. Intrinsics travel in a TOML sidecar.

use std::path::Path;

use image::{ImageBuffer, Luma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sensor::camera::CameraModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegMask {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl SegMask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            data: vec![0; (width * height) as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn in_bounds(&self, u: i64, v: i64) -> bool {
        u >= 0 && v >= 0 && u < self.width as i64 && v < self.height as i64
    }

    pub fn get(&self, u: u32, v: u32) -> bool {
        self.data[(v * self.width + u) as usize] != 0
    }

    /// Out-of-bounds reads are zero.
    pub fn value(&self, u: i64, v: i64) -> u32 {
        if self.in_bounds(u, v) {
            self.get(u as u32, v as u32) as u32
        } else {
            0
        }
    }

    pub fn set(&mut self, u: u32, v: u32, on: bool) {
        self.data[(v * self.width + u) as usize] = on as u8;
    }

    pub fn row(&self, v: u32) -> &[u8] {
        let start = (v * self.width) as usize;
        &self.data[start..start + self.width as usize]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b != 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.data.iter().all(|&b| b == 0)
    }

    pub fn clear(&mut self) {
        self.data.fill(0);
    }

    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0)
            .map(move |(i, _)| (i as u32 % self.width, i as u32 / self.width))
    }

    pub fn mirrored(&self) -> Self {
        let mut out = Self::new(self.width, self.height);
        for (u, v) in self.pixels() {
            out.set(self.width - 1 - u, v, true);
        }
        out
    }

    /// Square dilation by `radius` pixels.
    pub fn dilated(&self, radius: u32) -> Self {
        if radius == 0 {
            return self.clone();
        }
        let r = radius as i64;
        let mut out = Self::new(self.width, self.height);
        for (u, v) in self.pixels() {
            for dv in -r..=r {
                for du in -r..=r {
                    let (x, y) = (u as i64 + du, v as i64 + dv);
                    if self.in_bounds(x, y) {
                        out.set(x as u32, y as u32, true);
                    }
                }
            }
        }
        out
    }

    pub fn save_pgm(&self, path: &Path) -> Result<()> {
        let img: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::from_fn(self.width, self.height, |u, v| {
            Luma([if self.get(u, v) { 255 } else { 0 }])
        });
        img.save_with_format(path, image::ImageFormat::Pnm)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let img = image::open(path)?.into_luma8();
        let mut mask = Self::new(img.width(), img.height());
        for (u, v, p) in img.enumerate_pixels() {
            mask.set(u, v, p.0[0] > 127);
        }
        Ok(mask)
    }
}

pub const DEFAULT_DEPTH_SCALE: f64 = 0.001;

#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    width: u32,
    height: u32,
    data: Vec<f32>,
}

impl DepthImage {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; (width * height) as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Depth in metres; 0 marks an invalid pixel.
    pub fn get(&self, u: u32, v: u32) -> f64 {
        self.data[(v * self.width + u) as usize] as f64
    }

    pub fn set(&mut self, u: u32, v: u32, depth: f64) {
        self.data[(v * self.width + u) as usize] = depth as f32;
    }

    pub fn mirrored(&self) -> Self {
        let mut out = Self::new(self.width, self.height);
        for v in 0..self.height {
            for u in 0..self.width {
                out.set(self.width - 1 - u, v, self.get(u, v));
            }
        }
        out
    }

    /// 16-bit PGM in millimetres.
    pub fn save_pgm(&self, path: &Path) -> Result<()> {
        self.save_pgm_scaled(path, DEFAULT_DEPTH_SCALE)
    }

    /// 16-bit PGM with `scale` metres per unit.
    pub fn save_pgm_scaled(&self, path: &Path, scale: f64) -> Result<()> {
        if !(scale > 0.0) {
            return Err(Error::Argument("depth scale must be positive".into()));
        }
        let img: ImageBuffer<Luma<u16>, Vec<u16>> = ImageBuffer::from_fn(self.width, self.height, |u, v| {
            Luma([(self.get(u, v) / scale).round().clamp(0.0, u16::MAX as f64) as u16])
        });
        img.save_with_format(path, image::ImageFormat::Pnm)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::load_scaled(path, DEFAULT_DEPTH_SCALE)
    }

    pub fn load_scaled(path: &Path, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Argument("depth scale must be positive".into()));
        }
        let img = image::open(path)?.into_luma16();
        let mut depth = Self::new(img.width(), img.height());
        for (u, v, p) in img.enumerate_pixels() {
            depth.set(u, v, p.0[0] as f64 * scale);
        }
        Ok(depth)
    }
}

/// Sidecar describing how to interpret an exported mask/depth pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub camera: CameraModel,
    /// Metres per depth unit.
    pub depth_scale: f64,
}

impl Intrinsics {
    pub fn new(camera: CameraModel) -> Self {
        Self {
            camera,
            depth_scale: DEFAULT_DEPTH_SCALE,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::parse(path, e))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = toml::to_string_pretty(self).expect("intrinsics serialize");
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

pub fn check_dimensions(mask: &SegMask, depth: &DepthImage, camera: &CameraModel) -> Result<()> {
    let dims = [
        (mask.width(), mask.height()),
        (depth.width(), depth.height()),
        (camera.width, camera.height),
    ];
    if dims.iter().any(|d| *d != dims[0]) {
        return Err(Error::DimensionMismatch(format!(
            "mask {}x{}, depth {}x{}, intrinsics {}x{}",
            dims[0].0, dims[0].1, dims[1].0, dims[1].1, dims[2].0, dims[2].1
        )));
    }
    Ok(())
}
