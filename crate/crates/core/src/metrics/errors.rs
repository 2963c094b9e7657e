//! Per-transition errors measured from the logged GNSS trajectory.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{inter_row_distance, FieldSpec};
use crate::fsm::state::SwitchState;
use crate::fsm::trial::{TrajectorySample, TrialResult};
use crate::geometry::{signed_angle, Vec2};
use crate::reentry::Turn;
use crate::robot::RobotSpec;

/// Samples after F used for the F -> F_N direction.
pub const F_N_OFFSET: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Transition {
    AB,
    BC,
    CD,
    DE,
    EF,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorKind {
    Distance,
    Angle,
}

impl Transition {
    pub const ALL: [Transition; 5] = [Transition::AB, Transition::BC, Transition::CD, Transition::DE, Transition::EF];

    pub fn kind(self) -> ErrorKind {
        match self {
            Transition::CD | Transition::EF => ErrorKind::Angle,
            _ => ErrorKind::Distance,
        }
    }

    /// Unit of errors for this transition in tables and CSV files.
    pub fn unit(self) -> &'static str {
        match self.kind() {
            ErrorKind::Distance => "m",
            ErrorKind::Angle => "deg",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Transition::AB => "A->B",
            Transition::BC => "B->C",
            Transition::CD => "C->D",
            Transition::DE => "D->E",
            Transition::EF => "E->F",
        }
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Transition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Transition::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| Error::Argument(format!("unknown transition {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionError {
    pub transition: Transition,
    pub commanded: f64,
    pub achieved: f64,
    /// Signed; metres or degrees per `transition.unit()`.
    pub error: f64,
}

/// The five errors of one trial; entries are `None` when the trial failed
/// before the anchors they need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialErrors {
    pub trial: usize,
    pub entries: Vec<Option<TransitionError>>,
}

impl TrialErrors {
    pub fn get(&self, t: Transition) -> Option<TransitionError> {
        self.entries.iter().flatten().find(|e| e.transition == t).copied()
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }
}

pub fn transition_errors(trial: &TrialResult, index: usize, field: &FieldSpec, robot: &RobotSpec) -> Result<TrialErrors> {
    errors_from_samples(
        &trial.trajectory,
        index,
        trial.spec.row,
        trial.target_row,
        trial.spec.turn,
        field,
        robot,
    )
}

/// Error extraction from a trajectory alone (as logged or re-read from CSV).
pub fn errors_from_samples(
    samples: &[TrajectorySample],
    index: usize,
    row: usize,
    target: usize,
    turn: Turn,
    field: &FieldSpec,
    robot: &RobotSpec,
) -> Result<TrialErrors> {
    let anchor = |s: SwitchState| samples.iter().position(|p| p.state == s);
    let pos = |i: usize| Vec2::new(samples[i].x, samples[i].y);
    let [a, b, c, d, e, f] = [
        SwitchState::A,
        SwitchState::B,
        SwitchState::C,
        SwitchState::D,
        SwitchState::E,
        SwitchState::F,
    ]
    .map(anchor);
    let sign = turn.sign();
    let deg = |r: f64| r.to_degrees();

    let ab = b.map(|b| {
        let heading = Vec2::new(samples[b].theta.cos(), samples[b].theta.sin());
        let front = pos(b) + heading * robot.gnss_offset;
        let over = field.depth_past_eor(front);
        TransitionError { transition: Transition::AB, commanded: 0.0, achieved: over, error: over }
    });
    let bc = b.zip(c).map(|(b, c)| {
        let dist = (pos(c) - pos(b)).norm();
        TransitionError { transition: Transition::BC, commanded: robot.length, achieved: dist, error: dist - robot.length }
    });
    let de_vec = d.zip(e).map(|(d, e)| pos(e) - pos(d));
    let cd = a.zip(c).zip(de_vec).map(|((a, c), de)| {
        let angle = deg(signed_angle(pos(c) - pos(a), de)) * sign;
        TransitionError { transition: Transition::CD, commanded: 90.0, achieved: angle, error: angle - 90.0 }
    });
    let de = match de_vec {
        Some(v) => {
            let truth = inter_row_distance(field, row, target)?;
            let dist = v.norm();
            Some(TransitionError { transition: Transition::DE, commanded: truth, achieved: dist, error: dist - truth })
        }
        None => None,
    };
    let ef = de_vec
        .zip(f)
        .filter(|(_, f)| f + F_N_OFFSET < samples.len())
        .map(|(de, f)| {
            let ffn = pos(f + F_N_OFFSET) - pos(f);
            let angle = deg(signed_angle(de, ffn)) * sign;
            TransitionError { transition: Transition::EF, commanded: 90.0, achieved: angle, error: angle - 90.0 }
        });
    Ok(TrialErrors {
        trial: index,
        entries: vec![ab, bc, cd, de, ef],
    })
}
