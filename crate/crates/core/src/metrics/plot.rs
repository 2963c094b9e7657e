//! Minimal SVG plots for batch reports.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{ground_truth_line, FieldSpec};
use crate::fsm::trial::TrialResult;
use crate::geometry::{median, Vec2};
use crate::metrics::errors::{ErrorKind, Transition, TrialErrors};

const W: f64 = 900.0;
const H: f64 = 600.0;
const MARGIN: f64 = 50.0;

struct Frame {
    min: Vec2,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = Vec2>) -> Self {
        let (mut lo, mut hi) = (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY));
        for p in points {
            lo = lo.inf(&p);
            hi = hi.sup(&p);
        }
        let span = (hi - lo).map(|v| v.max(1e-6));
        let scale = ((W - 2.0 * MARGIN) / span.x).min((H - 2.0 * MARGIN) / span.y);
        Self { min: lo, scale }
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        (MARGIN + (p.x - self.min.x) * self.scale, H - MARGIN - (p.y - self.min.y) * self.scale)
    }
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn polyline(out: &mut String, pts: &[(f64, f64)], style: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
    let _ = writeln!(out, "<polyline fill=\"none\" {style} points=\"{}\"/>", coords.join(" "));
}

fn save(path: &Path, svg: String) -> Result<()> {
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

/// Field rows, their regression lines, the EOR line and every GNSS track.
pub fn trajectory_svg(path: &Path, field: &FieldSpec, trials: &[TrialResult]) -> Result<()> {
    let pts = field
        .rows
        .iter()
        .flat_map(|r| [r.start, r.end])
        .chain(trials.iter().flat_map(|t| t.trajectory.iter().map(|s| Vec2::new(s.x, s.y))));
    let f = Frame::fit(pts);
    let mut s = header();
    for row in &field.rows {
        for (a, b) in row.planted_segments() {
            polyline(&mut s, &[f.map(a), f.map(b)], "stroke=\"#3a7d2c\" stroke-width=\"3\"");
        }
        if let Ok(line) = ground_truth_line(field, row.index) {
            let a = line.point + line.direction * (row.start - line.point).dot(&line.direction);
            let b = line.point + line.direction * (row.end - line.point).dot(&line.direction);
            polyline(&mut s, &[f.map(a), f.map(b)], "stroke=\"black\" stroke-width=\"0.8\" stroke-dasharray=\"4 3\"");
        }
    }
    let (y0, y1) = (field.rows[0].end.y - 1.0, field.rows[field.rows.len() - 1].end.y + 1.0);
    let eor_a = field.eor_line.at((y0 - field.eor_line.point.y) / field.eor_line.direction.y);
    let eor_b = field.eor_line.at((y1 - field.eor_line.point.y) / field.eor_line.direction.y);
    polyline(&mut s, &[f.map(eor_a), f.map(eor_b)], "stroke=\"#999\" stroke-width=\"1\"");
    for t in trials {
        let colour = if t.success() { "#1f5fbf" } else { "#c0392b" };
        let track: Vec<(f64, f64)> = t.trajectory.iter().map(|p| f.map(Vec2::new(p.x, p.y))).collect();
        polyline(&mut s, &track, &format!("stroke=\"{colour}\" stroke-width=\"1\" stroke-opacity=\"0.6\""));
    }
    s.push_str("</svg>\n");
    save(path, s)
}

/// Per-transition errors normalised by the maximum absolute error of their
/// kind (percent), drawn as a scatter with a box-and-whisker overlay.
pub fn error_svg(path: &Path, trials: &[TrialErrors]) -> Result<()> {
    let e_max = |kind: ErrorKind| {
        trials
            .iter()
            .flat_map(|t| t.entries.iter().flatten())
            .filter(|e| e.transition.kind() == kind)
            .fold(0.0f64, |m, e| m.max(e.error.abs()))
    };
    let (dist, angle) = (e_max(ErrorKind::Distance), e_max(ErrorKind::Angle));
    let series: Vec<(Transition, Vec<f64>)> = Transition::ALL
        .iter()
        .map(|&t| {
            let m = if t.kind() == ErrorKind::Distance { dist } else { angle };
            let v = if m > 0.0 {
                trials.iter().filter_map(|e| e.get(t)).map(|e| 100.0 * e.error / m).collect()
            } else {
                Vec::new()
            };
            (t, v)
        })
        .collect();
    let y = |v: f64| H / 2.0 - v / 100.0 * (H / 2.0 - MARGIN);
    let mut s = header();
    for v in [-100.0, 0.0, 100.0] {
        polyline(&mut s, &[(MARGIN, y(v)), (W - MARGIN, y(v))], "stroke=\"#bbb\"");
        let _ = writeln!(s, "<text x=\"5\" y=\"{:.1}\" font-size=\"12\">{v}%</text>", y(v) + 4.0);
    }
    let slot = (W - 2.0 * MARGIN) / series.len() as f64;
    for (i, (t, v)) in series.iter().enumerate() {
        let cx = MARGIN + slot * (i as f64 + 0.5);
        let _ = writeln!(
            s,
            "<text x=\"{cx:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
            H - 15.0,
            t.label().replace('>', "&gt;")
        );
        if v.is_empty() {
            continue;
        }
        let half = slot * 0.2;
        for (k, e) in v.iter().enumerate() {
            // Golden-ratio spread keeps the scatter deterministic.
            let jitter = ((k as f64 * 0.618_034).fract() - 0.5) * 1.6 * half;
            let _ = writeln!(
                s,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"2\" fill=\"#1f5fbf\" fill-opacity=\"0.35\"/>",
                cx + jitter,
                y(*e)
            );
        }
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        let q = |p: f64| sorted[((sorted.len() - 1) as f64 * p).round() as usize];
        let (lo, q1, q3, hi) = (sorted[0], q(0.25), q(0.75), sorted[sorted.len() - 1]);
        let med = median(&sorted).unwrap_or(0.0);
        polyline(&mut s, &[(cx, y(lo)), (cx, y(hi))], "stroke=\"black\"");
        let _ = writeln!(
            s,
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"black\"/>",
            cx - half,
            y(q3),
            2.0 * half,
            (y(q1) - y(q3)).max(0.5)
        );
        polyline(&mut s, &[(cx - half, y(med)), (cx + half, y(med))], "stroke=\"#c0392b\" stroke-width=\"2\"");
    }
    s.push_str("</svg>\n");
    save(path, s)
}
