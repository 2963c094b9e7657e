//! Synthetic arable field: straight crop rows with gaps, a headland strip and
//! a terrain roughness map over the headland.
//!
//! Rows run roughly along +x and end on the EOR line `x = row_length`; the
//! headland extends from there to the field edge. Row indices increase with
//! +y, so a left turn at the headland moves to `index + 1`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Line2, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldConfig {
    pub row_count: usize,
    /// Nominal spacing between adjacent rows (m).
    pub nominal_inter_row: f64,
    /// Along-row extent from field start to the EOR line (m).
    pub row_length: f64,
    /// Distance from the EOR line to the field edge (m).
    pub headland_depth: f64,
    /// Relative spacing jitter `j`: spacing lies in `nominal * [1-j, 1+j]`.
    pub spacing_jitter: f64,
    /// Maximum pairwise row direction deviation (deg).
    pub planting_angle_jitter_deg: f64,
    pub gaps_per_row: usize,
    /// Length of each gap (m).
    pub gap_length: f64,
    /// Gaps are placed uniformly inside this fraction interval of each row.
    pub gap_region: [f64; 2],
    pub roughness: RoughnessConfig,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            row_count: 10,
            nominal_inter_row: 0.5,
            row_length: 10.0,
            headland_depth: 2.0,
            spacing_jitter: 0.15,
            planting_angle_jitter_deg: 1.0,
            gaps_per_row: 1,
            gap_length: 0.3,
            gap_region: [0.0, 0.8],
            roughness: RoughnessConfig::default(),
        }
    }
}

impl FieldConfig {
    /// Perfectly regular field: no spacing/angle jitter, no gaps, flat headland.
    pub fn regular(row_count: usize, inter_row: f64) -> Self {
        Self {
            row_count,
            nominal_inter_row: inter_row,
            spacing_jitter: 0.0,
            planting_angle_jitter_deg: 0.0,
            gaps_per_row: 0,
            roughness: RoughnessConfig {
                amplitude: 0.0,
                ..RoughnessConfig::default()
            },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.row_count < 2 {
            return bad("row_count must be at least 2");
        }
        if !(self.nominal_inter_row > 0.0) {
            return bad("nominal_inter_row must be positive");
        }
        if !(self.row_length > 0.0) {
            return bad("row_length must be positive");
        }
        if !(self.headland_depth > 0.0) {
            return bad("headland_depth must be positive");
        }
        if !(0.0..1.0).contains(&self.spacing_jitter) {
            return bad("spacing_jitter must lie in [0, 1)");
        }
        if !(0.0..45.0).contains(&self.planting_angle_jitter_deg) {
            return bad("planting_angle_jitter_deg must lie in [0, 45)");
        }
        if self.gaps_per_row > 0 && !(self.gap_length > 0.0 && self.gap_length < self.row_length) {
            return bad("gap_length must be positive and shorter than the row");
        }
        let [lo, hi] = self.gap_region;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return bad("gap_region must satisfy 0 <= lo < hi <= 1");
        }
        self.roughness.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoughnessConfig {
    pub cell_size: f64,
    /// Peak roughness; 0 gives a flat headland.
    pub amplitude: f64,
    /// Lattice spacing of the underlying value noise (m).
    pub correlation_length: f64,
}

impl Default for RoughnessConfig {
    fn default() -> Self {
        Self {
            cell_size: 0.25,
            amplitude: 1.0,
            correlation_length: 1.0,
        }
    }
}

impl RoughnessConfig {
    fn validate(&self) -> Result<()> {
        if !(self.cell_size > 0.0 && self.correlation_length > 0.0) {
            return Err(Error::Config("roughness lengths must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.amplitude) {
            return Err(Error::Config("roughness amplitude must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CropRow {
    pub index: usize,
    pub start: Vec2,
    /// EOR-side endpoint.
    pub end: Vec2,
    /// Missing segments as closed intervals of the `start -> end` parameter.
    #[serde(default)]
    pub gaps: Vec<[f64; 2]>,
}

impl CropRow {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    pub fn direction(&self) -> Vec2 {
        (self.end - self.start).normalize()
    }

    pub fn line(&self) -> Line2 {
        Line2 {
            point: self.end,
            direction: self.direction(),
        }
    }

    pub fn point_at(&self, t: f64) -> Vec2 {
        self.start + (self.end - self.start) * t
    }

    pub fn is_planted(&self, t: f64) -> bool {
        !self.gaps.iter().any(|[a, b]| t >= *a && t <= *b)
    }

    /// Planted sub-segments in world coordinates.
    pub fn planted_segments(&self) -> Vec<(Vec2, Vec2)> {
        let mut gaps = self.gaps.clone();
        gaps.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let mut out = Vec::new();
        let mut t = 0.0;
        for [a, b] in gaps {
            if a > t {
                out.push((self.point_at(t), self.point_at(a)));
            }
            t = t.max(b);
        }
        if t < 1.0 {
            out.push((self.point_at(t), self.end));
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if !(self.length() > 0.0) {
            return Err(Error::Config(format!("row {} has zero length", self.index)));
        }
        let mut gaps = self.gaps.clone();
        gaps.sort_by(|a, b| a[0].total_cmp(&b[0]));
        for g in &gaps {
            if !(0.0 <= g[0] && g[0] <= g[1] && g[1] <= 1.0) {
                return Err(Error::Config(format!("row {} has a gap outside [0, 1]", self.index)));
            }
        }
        for w in gaps.windows(2) {
            if w[1][0] <= w[0][1] {
                return Err(Error::Config(format!("row {} has overlapping gaps", self.index)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionLine {
    pub point: Vec2,
    pub direction: Vec2,
}

impl RegressionLine {
    pub fn as_line(&self) -> Line2 {
        Line2 {
            point: self.point,
            direction: self.direction,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadlandBuffer {
    /// Counter-clockwise: EOR-right, edge-right, edge-left, EOR-left (relative to row direction).
    pub polygon: [Vec2; 4],
}

impl HeadlandBuffer {
    pub fn contains(&self, p: Vec2) -> bool {
        (0..4).all(|i| {
            let a = self.polygon[i];
            let b = self.polygon[(i + 1) % 4];
            crate::geometry::cross(b - a, p - a) >= -1e-12
        })
    }
}

/// Per-cell headland roughness in [0, 1], regenerated from its seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughnessGrid {
    pub params: RoughnessParams,
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoughnessParams {
    pub seed: u64,
    pub origin: Vec2,
    pub cell_size: f64,
    pub nx: usize,
    pub ny: usize,
    pub amplitude: f64,
    pub correlation_length: f64,
}

impl RoughnessGrid {
    pub fn generate(params: RoughnessParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let extent_x = params.nx as f64 * params.cell_size;
        let extent_y = params.ny as f64 * params.cell_size;
        let lx = (extent_x / params.correlation_length).ceil() as usize + 2;
        let ly = (extent_y / params.correlation_length).ceil() as usize + 2;
        let lattice: Vec<f64> = (0..lx * ly).map(|_| rng.random::<f64>()).collect();
        let mut values = Vec::with_capacity(params.nx * params.ny);
        for j in 0..params.ny {
            for i in 0..params.nx {
                let gx = (i as f64 + 0.5) * params.cell_size / params.correlation_length;
                let gy = (j as f64 + 0.5) * params.cell_size / params.correlation_length;
                let (x0, y0) = (gx.floor() as usize, gy.floor() as usize);
                let (fx, fy) = (smooth(gx.fract()), smooth(gy.fract()));
                let at = |x: usize, y: usize| lattice[y * lx + x];
                let top = at(x0, y0) * (1.0 - fx) + at(x0 + 1, y0) * fx;
                let bot = at(x0, y0 + 1) * (1.0 - fx) + at(x0 + 1, y0 + 1) * fx;
                values.push(params.amplitude * (top * (1.0 - fy) + bot * fy));
            }
        }
        Self { params, values }
    }

    pub fn at(&self, p: Vec2) -> f64 {
        let rel = (p - self.params.origin) / self.params.cell_size;
        if rel.x < 0.0 || rel.y < 0.0 {
            return 0.0;
        }
        let (i, j) = (rel.x as usize, rel.y as usize);
        if i >= self.params.nx || j >= self.params.ny {
            return 0.0;
        }
        self.values[j * self.params.nx + i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    pub rows: Vec<CropRow>,
    pub nominal_inter_row: f64,
    pub eor_line: Line2,
    pub field_edge: Line2,
    pub roughness: RoughnessGrid,
}

pub fn generate_field(config: &FieldConfig, seed: u64) -> Result<FieldSpec> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half_angle = config.planting_angle_jitter_deg.to_radians() / 2.0;
    let eor_x = config.row_length;

    let mut rows = Vec::with_capacity(config.row_count);
    let mut y = 0.0;
    for index in 0..config.row_count {
        if index > 0 {
            let j = config.spacing_jitter;
            let factor = if j > 0.0 { rng.random_range(1.0 - j..=1.0 + j) } else { 1.0 };
            y += config.nominal_inter_row * factor;
        }
        let angle = if half_angle > 0.0 {
            rng.random_range(-half_angle..=half_angle)
        } else {
            0.0
        };
        // Rows pivot about their EOR endpoint so the EOR line stays straight.
        let end = Vec2::new(eor_x, y);
        let len = config.row_length / angle.cos();
        let start = end - Vec2::new(angle.cos(), angle.sin()) * len;
        let gaps = sample_gaps(config, len, &mut rng);
        rows.push(CropRow {
            index,
            start,
            end,
            gaps,
        });
    }

    let y_max = y;
    let margin = config.nominal_inter_row;
    let cell = config.roughness.cell_size;
    let params = RoughnessParams {
        seed: rng.random(),
        origin: Vec2::new(eor_x, -margin),
        cell_size: cell,
        nx: (config.headland_depth / cell).ceil() as usize,
        ny: ((y_max + 2.0 * margin) / cell).ceil() as usize,
        amplitude: config.roughness.amplitude,
        correlation_length: config.roughness.correlation_length,
    };

    let field = FieldSpec {
        rows,
        nominal_inter_row: config.nominal_inter_row,
        eor_line: Line2 {
            point: Vec2::new(eor_x, 0.0),
            direction: Vec2::new(0.0, 1.0),
        },
        field_edge: Line2 {
            point: Vec2::new(eor_x + config.headland_depth, 0.0),
            direction: Vec2::new(0.0, 1.0),
        },
        roughness: RoughnessGrid::generate(params),
    };
    field.validate()?;
    Ok(field)
}

fn sample_gaps(config: &FieldConfig, row_len: f64, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let width = config.gap_length / row_len;
    let [lo, hi] = config.gap_region;
    let mut gaps: Vec<[f64; 2]> = Vec::new();
    if hi - lo <= width {
        return gaps;
    }
    // Rejection-sample disjoint placements; give up quietly on crowded configs.
    let mut attempts = 0;
    while gaps.len() < config.gaps_per_row && attempts < 100 * config.gaps_per_row.max(1) {
        attempts += 1;
        let a = rng.random_range(lo..hi - width);
        let cand = [a, a + width];
        if gaps.iter().all(|g| cand[1] < g[0] || cand[0] > g[1]) {
            gaps.push(cand);
        }
    }
    gaps.sort_by(|a, b| a[0].total_cmp(&b[0]));
    gaps
}

impl FieldSpec {
    pub fn row(&self, index: usize) -> Result<&CropRow> {
        self.rows
            .get(index)
            .ok_or_else(|| Error::Argument(format!("row index {index} out of range")))
    }

    pub fn headland_depth(&self) -> f64 {
        self.eor_line.signed_distance(self.field_edge.point).abs()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.len() < 2 {
            return Err(Error::Config("a field needs at least two rows".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.index != i {
                return Err(Error::Config("rows must be ordered by index".into()));
            }
            row.validate()?;
        }
        if !(self.headland_depth() > 0.0) {
            return Err(Error::Config("headland depth must be positive".into()));
        }
        Ok(())
    }

    /// Signed distance past the EOR line into the headland.
    pub fn depth_past_eor(&self, p: Vec2) -> f64 {
        // eor_line direction is +y with rows arriving along +x, so the headland
        // lies on the right of the line.
        -self.eor_line.signed_distance(p)
    }

    pub fn roughness_at(&self, p: Vec2) -> f64 {
        self.roughness.at(p)
    }

    /// Row whose corridor (half the spacing to each neighbour) contains `p`,
    /// judged at `p`'s along-row position.
    pub fn corridor_of(&self, p: Vec2) -> Option<usize> {
        let offsets: Vec<f64> = self.rows.iter().map(|r| r.line().signed_distance(p)).collect();
        let (best, _) = offsets
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?;
        let half = |i: usize, j: usize| {
            let d = (offsets[i] - offsets[j]).abs();
            d / 2.0
        };
        let limit_left = if best + 1 < self.rows.len() {
            half(best, best + 1)
        } else {
            self.nominal_inter_row / 2.0
        };
        let limit_right = if best > 0 {
            half(best, best - 1)
        } else {
            self.nominal_inter_row / 2.0
        };
        let o = offsets[best];
        let inside = if o >= 0.0 { o <= limit_left } else { -o <= limit_right };
        inside.then_some(best)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: FieldFile = toml::from_str(&text).map_err(|e| Error::parse(path, e))?;
        file.into_spec()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = self.to_toml();
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(&FieldFile::from_spec(self)).expect("field serializes")
    }
}

/// On-disk fixture layout; the roughness grid is stored by seed and regenerated.
#[derive(Debug, Serialize, Deserialize)]
struct FieldFile {
    nominal_inter_row: f64,
    eor_line: Line2,
    field_edge: Line2,
    roughness: RoughnessParams,
    rows: Vec<CropRow>,
}

impl FieldFile {
    fn from_spec(spec: &FieldSpec) -> Self {
        Self {
            nominal_inter_row: spec.nominal_inter_row,
            eor_line: spec.eor_line,
            field_edge: spec.field_edge,
            roughness: spec.roughness.params.clone(),
            rows: spec.rows.clone(),
        }
    }

    fn into_spec(self) -> Result<FieldSpec> {
        let spec = FieldSpec {
            rows: self.rows,
            nominal_inter_row: self.nominal_inter_row,
            eor_line: self.eor_line,
            field_edge: self.field_edge,
            roughness: RoughnessGrid::generate(self.roughness),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Ordinary least-squares line, regressing the minor coordinate on the major one.
pub fn regression_line(points: &[Vec2]) -> Option<RegressionLine> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean = points.iter().fold(Vec2::zeros(), |a, p| a + p) / n;
    let (sxx, syy) = points.iter().fold((0.0, 0.0), |(sx, sy), p| {
        let d = p - mean;
        (sx + d.x * d.x, sy + d.y * d.y)
    });
    if sxx == 0.0 && syy == 0.0 {
        return None;
    }
    let x_major = sxx >= syy;
    let sxy: f64 = points.iter().map(|p| (p.x - mean.x) * (p.y - mean.y)).sum();
    let direction = if x_major {
        Vec2::new(1.0, sxy / sxx)
    } else {
        Vec2::new(sxy / syy, 1.0)
    }
    .normalize();
    Some(RegressionLine {
        point: mean,
        direction,
    })
}

/// Regression line through points sampled every 5 cm along the planted parts
/// of a row, oriented from row start to EOR.
pub fn ground_truth_line(field: &FieldSpec, row_index: usize) -> Result<RegressionLine> {
    const SPACING: f64 = 0.05;
    let row = field.row(row_index)?;
    let len = row.length();
    let n = (len / SPACING).floor() as usize;
    let samples: Vec<Vec2> = (0..=n)
        .map(|k| (k as f64 * SPACING) / len)
        .filter(|&t| row.is_planted(t))
        .map(|t| row.point_at(t))
        .collect();
    let mut line = regression_line(&samples).ok_or(Error::DegenerateRow(row_index))?;
    if line.direction.dot(&row.direction()) < 0.0 {
        line.direction = -line.direction;
    }
    Ok(line)
}

/// Line halfway between two rows, oriented along the first row.
fn mid_line(a: &Line2, b: &Line2, eor: &Line2) -> Line2 {
    let mut db = b.direction;
    if db.dot(&a.direction) < 0.0 {
        db = -db;
    }
    let direction = (a.direction + db).normalize();
    let pa = a.intersect(eor).unwrap_or(a.point);
    let pb = b.intersect(eor).unwrap_or(b.point);
    Line2 {
        point: (pa + pb) / 2.0,
        direction,
    }
}

pub fn headland_buffer(field: &FieldSpec, row_index: usize) -> Result<HeadlandBuffer> {
    let row = field.row(row_index)?.line();
    let half = field.nominal_inter_row / 2.0;
    let shifted = |sign: f64| Line2 {
        point: row.point + row.normal() * (sign * half),
        direction: row.direction,
    };
    let left = match field.rows.get(row_index + 1) {
        Some(next) => mid_line(&row, &next.line(), &field.eor_line),
        None => shifted(1.0),
    };
    let right = match row_index.checked_sub(1).and_then(|i| field.rows.get(i)) {
        Some(prev) => mid_line(&row, &prev.line(), &field.eor_line),
        None => shifted(-1.0),
    };
    let corner = |a: &Line2, b: &Line2| {
        a.intersect(b)
            .ok_or_else(|| Error::Argument("row parallel to EOR line".into()))
    };
    Ok(HeadlandBuffer {
        polygon: [
            corner(&right, &field.eor_line)?,
            corner(&right, &field.field_edge)?,
            corner(&left, &field.field_edge)?,
            corner(&left, &field.eor_line)?,
        ],
    })
}

/// Spacing between adjacent rows, measured between their regression lines
/// where they meet the EOR line, perpendicular to the mean row direction.
pub fn inter_row_distance(field: &FieldSpec, row_a: usize, row_b: usize) -> Result<f64> {
    if row_a.abs_diff(row_b) != 1 {
        return Err(Error::Argument(format!(
            "rows {row_a} and {row_b} are not adjacent"
        )));
    }
    let la = ground_truth_line(field, row_a)?.as_line();
    let lb = ground_truth_line(field, row_b)?.as_line();
    let pa = la
        .intersect(&field.eor_line)
        .ok_or_else(|| Error::Argument("row parallel to EOR line".into()))?;
    let pb = lb
        .intersect(&field.eor_line)
        .ok_or_else(|| Error::Argument("row parallel to EOR line".into()))?;
    let mut db = lb.direction;
    if db.dot(&la.direction) < 0.0 {
        db = -db;
    }
    let u = (la.direction + db).normalize();
    Ok(crate::geometry::cross(u, pb - pa).abs())
}
