//! Skeleton components, the central row trace and the end-of-row detector.
//!
//! Image lines use `Line2` with x = column u and y = row v.

use serde::{Deserialize, Serialize};

use crate::geometry::{fit_line, Line2, Vec2};
use crate::sensor::image::SegMask;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EorConfig {
    pub smoothing_window: u32,
    /// Pixels required inside the smoothing window below the EOR row.
    pub min_support: usize,
    /// Components within this distance of the central line are merged into it.
    pub merge_tolerance_px: f64,
    pub min_component_pixels: usize,
}

impl Default for EorConfig {
    fn default() -> Self {
        Self {
            smoothing_window: 5,
            min_support: 2,
            merge_tolerance_px: 3.0,
            min_component_pixels: 3,
        }
    }
}

/// 8-connected group of mask pixels, sorted by (v, u).
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub pixels: Vec<(u32, u32)>,
}

impl Component {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn points(&self) -> Vec<Vec2> {
        self.pixels.iter().map(|&(u, v)| Vec2::new(u as f64, v as f64)).collect()
    }

    pub fn image_line(&self, width: u32) -> Option<Line2> {
        centred_fit(&self.pixels, width)
    }
}

/// Total least-squares fit computed in coordinates centred on the image's
/// vertical axis, so a mirrored mask yields the exactly mirrored line.
fn centred_fit(pixels: &[(u32, u32)], width: u32) -> Option<Line2> {
    let half = (width as f64 - 1.0) / 2.0;
    let pts: Vec<Vec2> = pixels.iter().map(|&(u, v)| Vec2::new(u as f64 - half, v as f64)).collect();
    let mut line = fit_line(&pts)?;
    if line.direction.y < 0.0 || (line.direction.y == 0.0 && line.direction.x < 0.0) {
        line.direction = -line.direction;
    }
    line.point.x += half;
    Some(line)
}

/// Column where an image line crosses row `v`; `None` for horizontal lines.
pub fn column_at_row(line: &Line2, v: f64) -> Option<f64> {
    if line.direction.y.abs() < 1e-9 {
        return None;
    }
    let s = (v - line.point.y) / line.direction.y;
    Some(line.point.x + s * line.direction.x)
}

/// Index of the first non-zero byte, skipping empty 16-byte blocks.
fn first_nonzero(bytes: &[u8]) -> Option<usize> {
    let mut chunks = bytes.chunks_exact(16);
    let mut base = 0;
    for c in &mut chunks {
        if u128::from_ne_bytes(c.try_into().expect("16 bytes")) != 0 {
            return c.iter().position(|&b| b != 0).map(|i| base + i);
        }
        base += 16;
    }
    chunks.remainder().iter().position(|&b| b != 0).map(|i| base + i)
}

pub fn components(mask: &SegMask, min_pixels: usize) -> Vec<Component> {
    struct Run {
        v: u32,
        u0: u32,
        u1: u32,
    }
    let mut runs: Vec<Run> = Vec::new();
    let mut row_start = Vec::with_capacity(mask.height() as usize + 1);
    for v in 0..mask.height() {
        row_start.push(runs.len());
        let row = mask.row(v);
        let mut u = 0usize;
        while u < row.len() {
            if row[u] == 0 {
                match first_nonzero(&row[u..]) {
                    Some(off) => u += off,
                    None => break,
                }
            }
            let start = u;
            while u < row.len() && row[u] != 0 {
                u += 1;
            }
            runs.push(Run { v, u0: start as u32, u1: (u - 1) as u32 });
        }
    }
    row_start.push(runs.len());

    let mut parent: Vec<usize> = (0..runs.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for v in 1..mask.height() as usize {
        let (prev, cur) = (row_start[v - 1]..row_start[v], row_start[v]..row_start[v + 1]);
        let mut j = prev.start;
        for i in cur {
            while j < prev.end && runs[j].u1 + 1 < runs[i].u0 {
                j += 1;
            }
            let mut k = j;
            while k < prev.end && runs[k].u0 <= runs[i].u1 + 1 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, k));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
                k += 1;
            }
        }
    }

    let mut index_of_root = vec![usize::MAX; runs.len()];
    let mut out: Vec<Component> = Vec::new();
    for i in 0..runs.len() {
        let r = find(&mut parent, i);
        if index_of_root[r] == usize::MAX {
            index_of_root[r] = out.len();
            out.push(Component { pixels: Vec::new() });
        }
        let c = &mut out[index_of_root[r]];
        c.pixels.extend((runs[i].u0..=runs[i].u1).map(|u| (u, runs[i].v)));
    }
    out.retain(|c| c.len() >= min_pixels);
    out
}

/// The skeleton of the row the robot is standing in.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralTrace {
    /// Sorted by (v, u).
    pub pixels: Vec<(u32, u32)>,
    pub line: Line2,
}

impl CentralTrace {
    pub fn top_row(&self) -> u32 {
        self.pixels[0].1
    }
}

/// Picks the component whose fitted line crosses the middle image row
/// closest to the centre column, inside the central third, then merges
/// components lying on the same line (gaps in the row).
pub fn central_trace(mask: &SegMask, cfg: &EorConfig) -> Option<CentralTrace> {
    let (w, h) = (mask.width(), mask.height());
    let centre = (w as f64 - 1.0) / 2.0;
    let third = w as f64 / 6.0;
    let middle = (h as f64 - 1.0) / 2.0;
    let comps = components(mask, cfg.min_component_pixels);
    let lines: Vec<Option<Line2>> = comps.iter().map(|c| c.image_line(w)).collect();

    let mut best: Option<(usize, f64)> = None;
    for (i, line) in lines.iter().enumerate() {
        let Some(u) = line.as_ref().and_then(|l| column_at_row(l, middle)) else {
            continue;
        };
        let off = (u - centre).abs();
        if off <= third && best.map_or(true, |(_, b)| off < b) {
            best = Some((i, off));
        }
    }
    let (seed, _) = best?;
    let seed_line = lines[seed]?;
    let mut pixels = comps[seed].pixels.clone();
    for (i, c) in comps.iter().enumerate() {
        if i == seed {
            continue;
        }
        let on_line = c.pixels.iter().all(|&(u, v)| {
            seed_line.signed_distance(Vec2::new(u as f64, v as f64)).abs() <= cfg.merge_tolerance_px
        });
        if on_line {
            pixels.extend_from_slice(&c.pixels);
        }
    }
    pixels.sort_by_key(|&(u, v)| (v, u));
    let line = centred_fit(&pixels, w)?;
    Some(CentralTrace { pixels, line })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EorDetection {
    pub image_row: u32,
    pub valid: bool,
}

impl EorDetection {
    pub fn invalid() -> Self {
        Self { image_row: 0, valid: false }
    }
}

/// Ground distance ahead of the camera for a detection. The row end lies
/// inside the top trace pixel, so the pixel's upper edge is used.
pub fn eor_ground_distance(cam: &crate::sensor::camera::CameraModel, eor: &EorDetection) -> Option<f64> {
    if !eor.valid {
        return None;
    }
    cam.ground_distance_of_row(eor.image_row as f64 - 0.5)
}

pub fn detect_eor(mask: &SegMask) -> EorDetection {
    detect_eor_with(mask, &EorConfig::default())
}

pub fn detect_eor_with(mask: &SegMask, cfg: &EorConfig) -> EorDetection {
    match central_trace(mask, cfg) {
        Some(trace) => eor_from_trace(&trace, cfg),
        None => EorDetection::invalid(),
    }
}

/// Topmost row whose smoothing window (that row and the ones below it) holds
/// at least `min_support` trace pixels.
pub fn eor_from_trace(trace: &CentralTrace, cfg: &EorConfig) -> EorDetection {
    let rows: Vec<u32> = trace.pixels.iter().map(|p| p.1).collect();
    let window = cfg.smoothing_window.max(1);
    for (i, &v) in rows.iter().enumerate() {
        let support = rows[i..].iter().take_while(|&&r| r < v + window).count();
        if support >= cfg.min_support {
            return EorDetection { image_row: v, valid: true };
        }
    }
    EorDetection::invalid()
}
