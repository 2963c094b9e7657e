//! Per-transition summary: medians and the normalised error alpha.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::median;
use crate::metrics::errors::{ErrorKind, Transition, TransitionError, TrialErrors};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub transition: Transition,
    pub unit: String,
    pub n: usize,
    pub median: f64,
    pub median_abs: f64,
    /// `median / e_max`; `None` when every error of this kind is zero.
    pub alpha: Option<f64>,
    pub e_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub rows: Vec<TableRow>,
    pub e_max_distance: f64,
    pub e_max_angle: f64,
}

impl ErrorTable {
    pub fn row(&self, t: Transition) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.transition == t)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        w.write_record(["transition", "unit", "n", "median", "median_abs", "alpha", "e_max"])?;
        for r in &self.rows {
            w.write_record([
                r.transition.label().to_string(),
                r.unit.clone(),
                r.n.to_string(),
                r.median.to_string(),
                r.median_abs.to_string(),
                r.alpha.map(|a| a.to_string()).unwrap_or_else(|| "n/a".into()),
                r.e_max.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    /// Human-readable table: distances in cm, angles in degrees, alpha in %.
    pub fn render(&self) -> String {
        let mut s = format!("{:<6} {:>5} {:>12} {:>12} {:>9}\n", "", "n", "median", "median|e|", "alpha");
        for r in &self.rows {
            let (scale, unit) = match r.transition.kind() {
                ErrorKind::Distance => (100.0, "cm"),
                ErrorKind::Angle => (1.0, "deg"),
            };
            let alpha = r.alpha.map(|a| format!("{:.2}%", a * 100.0)).unwrap_or_else(|| "n/a".into());
            s.push_str(&format!(
                "{:<6} {:>5} {:>8.2} {:<3} {:>8.2} {:<3} {:>9}\n",
                r.transition.label(),
                r.n,
                r.median * scale,
                unit,
                r.median_abs * scale,
                unit,
                alpha
            ));
        }
        s.push_str(&format!(
            "E_max distance {:.2} cm, angle {:.2} deg\n",
            self.e_max_distance * 100.0,
            self.e_max_angle
        ));
        s
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::parse(path, e.to_string())
}

/// Builds the table from every available error. Transitions with no samples
/// are omitted.
pub fn alpha_table(trials: &[TrialErrors]) -> Result<ErrorTable> {
    let all: Vec<TransitionError> = trials.iter().flat_map(|t| t.entries.iter().flatten().copied()).collect();
    if all.is_empty() {
        return Err(Error::Argument("no transition errors to summarise".into()));
    }
    let e_max = |kind: ErrorKind| {
        all.iter()
            .filter(|e| e.transition.kind() == kind)
            .map(|e| e.error.abs())
            .fold(0.0, f64::max)
    };
    let (e_max_distance, e_max_angle) = (e_max(ErrorKind::Distance), e_max(ErrorKind::Angle));
    let mut rows = Vec::new();
    for t in Transition::ALL {
        let errs: Vec<f64> = all.iter().filter(|e| e.transition == t).map(|e| e.error).collect();
        let Some(med) = median(&errs) else { continue };
        let abs: Vec<f64> = errs.iter().map(|e| e.abs()).collect();
        let e_max = match t.kind() {
            ErrorKind::Distance => e_max_distance,
            ErrorKind::Angle => e_max_angle,
        };
        rows.push(TableRow {
            transition: t,
            unit: t.unit().into(),
            n: errs.len(),
            median: med,
            median_abs: median(&abs).unwrap_or(0.0),
            alpha: (e_max > 0.0).then(|| med / e_max),
            e_max,
        });
    }
    Ok(ErrorTable { rows, e_max_distance, e_max_angle })
}

/// Alpha for already aggregated medians and maxima.
pub fn alpha_from_medians(median: f64, e_max: f64) -> Result<f64> {
    if !(e_max > 0.0) {
        return Err(Error::Argument("alpha is undefined for a zero maximum error".into()));
    }
    Ok(median / e_max)
}

#[derive(Debug, Serialize, Deserialize)]
struct ErrorRecord {
    trial: usize,
    transition: String,
    commanded: f64,
    achieved: f64,
    error: f64,
    unit: String,
}

pub fn write_errors_csv(path: &Path, trials: &[TrialErrors]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for t in trials {
        for e in t.entries.iter().flatten() {
            w.serialize(ErrorRecord {
                trial: t.trial,
                transition: e.transition.label().into(),
                commanded: e.commanded,
                achieved: e.achieved,
                error: e.error,
                unit: e.transition.unit().into(),
            })?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_errors_csv(path: &Path) -> Result<Vec<TrialErrors>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut out: Vec<TrialErrors> = Vec::new();
    for rec in r.deserialize::<ErrorRecord>() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let transition: Transition = rec.transition.parse()?;
        if rec.unit != transition.unit() {
            return Err(Error::parse(path, format!("unit {:?} does not match {}", rec.unit, transition)));
        }
        let entry = TransitionError { transition, commanded: rec.commanded, achieved: rec.achieved, error: rec.error };
        match out.iter_mut().find(|t| t.trial == rec.trial) {
            Some(t) => t.entries.push(Some(entry)),
            None => out.push(TrialErrors { trial: rec.trial, entries: vec![Some(entry)] }),
        }
    }
    Ok(out)
}

/// Re-ingests an errors CSV and rebuilds the summary table.
pub fn error_table_from_csv(path: &Path) -> Result<ErrorTable> {
    alpha_table(&read_errors_csv(path)?)
}
