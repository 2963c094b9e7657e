//! The seven-state row-switching controller and its trial driver.

pub mod follower;
pub mod state;
pub mod trial;

pub use follower::{FollowerGains, RowEstimate, RowTracker};
pub use state::{FailReason, StateMachine, SwitchState, TransitionRecord, Unit};
pub use trial::{
    f_pose, run_reentry, run_trial, run_trial_hooked, run_trial_with, Anchor, HeadingSource, OdometryHeading, ControllerConfig, Setup, TrajectorySample, TrialOptions,
    TrialResult, TrialSpec,
};
