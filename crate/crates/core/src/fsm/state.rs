use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailReason {
    LostRow,
    EorStopTimeout,
    NoDr,
    SkipRow,
    SameRow,
    NoRowInView,
}

impl FailReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailReason::LostRow => "lost_row",
            FailReason::EorStopTimeout => "eor_stop_timeout",
            FailReason::NoDr => "no_dr",
            FailReason::SkipRow => "skip_row",
            FailReason::SameRow => "same_row",
            FailReason::NoRowInView => "no_row_in_view",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SwitchState {
    InRow,
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    Failed(FailReason),
}

impl SwitchState {
    pub const SEQUENCE: [SwitchState; 8] = [
        SwitchState::InRow,
        SwitchState::A,
        SwitchState::B,
        SwitchState::C,
        SwitchState::D,
        SwitchState::E,
        SwitchState::F,
        SwitchState::G,
    ];

    pub fn successor(self) -> Option<SwitchState> {
        use SwitchState::*;
        match self {
            InRow => Some(A),
            A => Some(B),
            B => Some(C),
            C => Some(D),
            D => Some(E),
            E => Some(F),
            F => Some(G),
            G | Failed(_) => None,
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, SwitchState::G | SwitchState::Failed(_))
    }

    pub fn label(self) -> String {
        match self {
            SwitchState::InRow => "in_row".into(),
            SwitchState::Failed(r) => format!("failed:{}", r.as_str()),
            s => format!("{s:?}"),
        }
    }

    pub fn parse(label: &str) -> Option<Self> {
        if let Some(reason) = label.strip_prefix("failed:") {
            let r = [
                FailReason::LostRow,
                FailReason::EorStopTimeout,
                FailReason::NoDr,
                FailReason::SkipRow,
                FailReason::SameRow,
                FailReason::NoRowInView,
            ]
            .into_iter()
            .find(|r| r.as_str() == reason)?;
            return Some(SwitchState::Failed(r));
        }
        Self::SEQUENCE.into_iter().find(|s| s.label() == label)
    }
}

impl fmt::Display for SwitchState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Guards the state sequence: only the successor or `Failed` may follow,
/// and `Failed`/`G` end the machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateMachine {
    state: SwitchState,
    history: Vec<SwitchState>,
}

impl StateMachine {
    pub fn new(start: SwitchState) -> Self {
        Self {
            state: start,
            history: vec![start],
        }
    }

    pub fn state(&self) -> SwitchState {
        self.state
    }

    pub fn history(&self) -> &[SwitchState] {
        &self.history
    }

    pub fn advance(&mut self, to: SwitchState) -> Result<SwitchState> {
        let allowed = match (self.state, to) {
            (SwitchState::Failed(_), _) | (SwitchState::G, _) => false,
            (_, SwitchState::Failed(_)) => true,
            (from, to) => from.successor() == Some(to),
        };
        if !allowed {
            return Err(Error::State(format!("illegal transition {} -> {}", self.state, to)));
        }
        self.state = to;
        self.history.push(to);
        Ok(to)
    }

    pub fn fail(&mut self, reason: FailReason) -> Result<SwitchState> {
        self.advance(SwitchState::Failed(reason))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    M,
    Rad,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::M => "m",
            Unit::Rad => "rad",
        }
    }
}

/// What the controller commanded for one transition and what happened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub from: SwitchState,
    pub to: SwitchState,
    pub commanded: f64,
    pub achieved_true: f64,
    pub achieved_odom: f64,
    /// Signed; for A->B the front-edge overshoot past the EOR.
    pub error: f64,
    pub unit: Unit,
}
