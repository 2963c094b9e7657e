//! Batch summaries and the files written for them.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::fsm::state::SwitchState;
use crate::fsm::trial::{TrajectorySample, TrialResult};
use crate::metrics::errors::{transition_errors, Transition, TrialErrors};
use crate::metrics::headland::{headland_requirement, with_coefficient, HeadlandRequirement, REPORTED_COEFFICIENT, STATED_COEFFICIENT};
use crate::metrics::plot::{error_svg, trajectory_svg};
use crate::metrics::table::{alpha_table, write_errors_csv, ErrorTable};
use crate::robot::RobotSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Count per final state label.
    pub outcomes: BTreeMap<String, usize>,
    pub table: Option<ErrorTable>,
    /// Largest combined A->B and B->C error over the batch (m).
    pub e_abc_max: Option<f64>,
    /// Headland width from the GNSS ratio and from the printed coefficient.
    pub headland: Option<HeadlandRequirement>,
    pub headland_stated: Option<HeadlandRequirement>,
}

pub fn collect_errors(results: &[TrialResult], field: &FieldSpec, robot: &RobotSpec) -> Result<Vec<TrialErrors>> {
    results.iter().enumerate().map(|(i, r)| transition_errors(r, i, field, robot)).collect()
}

pub fn summarize(results: &[TrialResult], errors: &[TrialErrors], robot: &RobotSpec) -> Result<BatchSummary> {
    if results.is_empty() {
        return Err(Error::Argument("empty batch".into()));
    }
    let successes = results.iter().filter(|r| r.success()).count();
    let mut outcomes = BTreeMap::new();
    for r in results {
        *outcomes.entry(r.final_state.label()).or_insert(0) += 1;
    }
    let table = alpha_table(errors).ok();
    let e_abc_max = errors
        .iter()
        .filter_map(|e| Some(e.get(Transition::AB)?.error + e.get(Transition::BC)?.error))
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let positive = e_abc_max.filter(|e| *e > 0.0);
    Ok(BatchSummary {
        trials: results.len(),
        successes,
        success_rate: successes as f64 / results.len() as f64,
        outcomes,
        table,
        e_abc_max,
        headland: positive.map(|e| headland_requirement(robot.length, e, robot.gnss_ratio())).transpose()?,
        headland_stated: positive.map(|e| with_coefficient(robot.length, e, STATED_COEFFICIENT)).transpose()?,
    })
}

impl BatchSummary {
    pub fn render(&self) -> String {
        let mut s = format!(
            "trials {}  success {} ({:.1}%)\n",
            self.trials,
            self.successes,
            self.success_rate * 100.0
        );
        for (k, v) in &self.outcomes {
            s.push_str(&format!("  {k}: {v}\n"));
        }
        if let Some(t) = &self.table {
            s.push('\n');
            s.push_str(&t.render());
        }
        if let (Some(h), Some(st)) = (&self.headland, &self.headland_stated) {
            s.push_str(&format!(
                "\nE_ABC,max {:.2} cm\nheadland width {:.2} cm with coefficient {:.3} (1 + R), {:.2} cm with {:.2}\n",
                h.e_abc_max * 100.0,
                h.w_h_min * 100.0,
                h.coefficient,
                st.w_h_min * 100.0,
                st.coefficient
            ));
            if let Ok(r) = with_coefficient(h.l_robot, h.e_abc_max, REPORTED_COEFFICIENT) {
                s.push_str(&format!(
                    "note: coefficient {:.2} does not reproduce the 143.17 cm reference width \
                     (L 52.6 cm, E_ABC,max 64.27 cm); {:.2} does. With {:.2} this batch needs {:.2} cm\n",
                    STATED_COEFFICIENT,
                    REPORTED_COEFFICIENT,
                    REPORTED_COEFFICIENT,
                    r.w_h_min * 100.0
                ));
            }
        } else if let Some(e) = self.e_abc_max {
            s.push_str(&format!("\nE_ABC,max {:.2} cm, no overshoot past the turn point; headland width not computed\n", e * 100.0));
        }
        s
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleRecord {
    t: f64,
    x: f64,
    y: f64,
    theta: f64,
    state: String,
}

pub fn write_trajectory_csv(path: &Path, samples: &[TrajectorySample]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::parse(path, e.to_string()))?;
    for s in samples {
        w.serialize(SampleRecord { t: s.t, x: s.x, y: s.y, theta: s.theta, state: s.state.label() })?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_trajectory_csv(path: &Path) -> Result<Vec<TrajectorySample>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e.to_string()))?;
    r.deserialize::<SampleRecord>()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::parse(path, e.to_string()))?;
            let state = SwitchState::parse(&rec.state)
                .ok_or_else(|| Error::parse(path, format!("unknown state {:?}", rec.state)))?;
            Ok(TrajectorySample { t: rec.t, x: rec.x, y: rec.y, theta: rec.theta, state })
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct OutcomeRecord<'a> {
    trial: usize,
    row: usize,
    turn: &'a str,
    seed: u64,
    target_row: usize,
    final_state: String,
    d_r: Option<f64>,
    heading_error_at_a_deg: Option<f64>,
}

pub fn write_outcomes_csv(path: &Path, results: &[TrialResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::parse(path, e.to_string()))?;
    for (i, r) in results.iter().enumerate() {
        w.serialize(OutcomeRecord {
            trial: i,
            row: r.spec.row,
            turn: r.spec.turn.as_str(),
            seed: r.spec.seed,
            target_row: r.target_row,
            final_state: r.final_state.label(),
            d_r: r.d_r,
            heading_error_at_a_deg: r.heading_error_at_a,
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Writes errors.csv, summary.csv, outcomes.csv, summary.txt, per-trial
/// trajectories and SVG plots into `dir`.
pub fn write_report(dir: &Path, results: &[TrialResult], field: &FieldSpec, robot: &RobotSpec) -> Result<BatchSummary> {
    let traj_dir = dir.join("trajectories");
    std::fs::create_dir_all(&traj_dir).map_err(|e| Error::io(&traj_dir, e))?;
    let errors = collect_errors(results, field, robot)?;
    let summary = summarize(results, &errors, robot)?;
    write_errors_csv(&dir.join("errors.csv"), &errors)?;
    if let Some(t) = &summary.table {
        t.write_csv(&dir.join("summary.csv"))?;
    }
    write_outcomes_csv(&dir.join("outcomes.csv"), results)?;
    for (i, r) in results.iter().enumerate() {
        write_trajectory_csv(&traj_dir.join(format!("trial_{i:04}.csv")), &r.trajectory)?;
    }
    let text = dir.join("summary.txt");
    std::fs::write(&text, summary.render()).map_err(|e| Error::io(&text, e))?;
    trajectory_svg(&dir.join("trajectories.svg"), field, results)?;
    error_svg(&dir.join("errors.svg"), &errors)?;
    Ok(summary)
}
