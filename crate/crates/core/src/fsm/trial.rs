//! One row-switching trial: in-row approach, exit, U-turn and re-entry.

use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::fsm::follower::{estimate_from_pixels, row_candidates, steer, FollowerGains, RowEstimate, RowTracker};
use crate::fsm::state::{FailReason, StateMachine, SwitchState, TransitionRecord, Unit};
use crate::geometry::{wrap_angle, Pose2D, Vec2};
use crate::profile::NoiseProfile;
use crate::reentry::{locate_reentry, ReentryResult, Turn};
use crate::robot::{step_true, Odometer, RobotSpec, Twist};
use crate::sensor::camera::{CameraFrame, CameraModel};
use crate::sensor::image::{DepthImage, SegMask};
use crate::sensor::render::{apply_mask_noise, render_depth, render_mask};
use crate::sensor::similarity::{FootprintScorer, ReferenceConfig, ReferenceScene, SceneScorer};
use crate::sensor::skeleton::{central_trace, detect_eor_with, eor_from_trace, eor_ground_distance, EorConfig, EorDetection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControllerConfig {
    pub dt: f64,
    pub perception_period: f64,
    pub log_period: f64,
    pub v_in_row: f64,
    pub v_switch: f64,
    pub omega: f64,
    /// State A fires when the detected EOR is closer than this to the front edge (m).
    pub trigger_range: f64,
    pub score_threshold: f64,
    pub reference: ReferenceConfig,
    /// A->B gives up after this much odometric travel (m).
    pub max_exit_travel: f64,
    /// Travel without a usable row detection before the row counts as lost (m).
    pub lost_row_distance: f64,
    pub follower: FollowerGains,
    /// Depth into the field at which the re-entry outcome is judged (m).
    pub entry_depth: f64,
    pub max_entry_travel: f64,
    /// Front-edge distance before the EOR where a trial starts (m).
    pub start_distance: f64,
    pub eor: EorConfig,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            perception_period: 0.1,
            log_period: 0.1,
            v_in_row: 0.5,
            v_switch: 0.3,
            omega: 0.5,
            trigger_range: 1.5,
            score_threshold: 0.3,
            reference: ReferenceConfig::default(),
            max_exit_travel: 3.0,
            lost_row_distance: 1.0,
            follower: FollowerGains::default(),
            entry_depth: 2.0,
            max_entry_travel: 5.0,
            start_distance: 3.0,
            eor: EorConfig::default(),
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.dt,
            self.perception_period,
            self.log_period,
            self.v_in_row,
            self.v_switch,
            self.omega,
            self.max_exit_travel,
            self.lost_row_distance,
            self.entry_depth,
            self.max_entry_travel,
            self.start_distance,
        ];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Config("controller rates, speeds and distances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialOptions {
    /// Initial lateral offset from the row line, left positive (m).
    pub start_offset: f64,
    pub start_heading_deg: f64,
    /// Heading error added to the true pose on reaching A (deg, left positive).
    pub heading_error_at_a_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub row: usize,
    pub turn: Turn,
    pub seed: u64,
    #[serde(default)]
    pub options: TrialOptions,
}

impl TrialSpec {
    pub fn new(row: usize, turn: Turn, seed: u64) -> Self {
        Self {
            row,
            turn,
            seed,
            options: TrialOptions::default(),
        }
    }
}

/// Everything a trial needs besides its own spec; shared read-only by a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub field: FieldSpec,
    pub robot: RobotSpec,
    pub camera: CameraModel,
    pub profile: NoiseProfile,
    pub controller: ControllerConfig,
}

impl Setup {
    pub fn new(field: FieldSpec, profile: NoiseProfile) -> Self {
        Self {
            field,
            robot: RobotSpec::default(),
            camera: CameraModel::default(),
            profile,
            controller: ControllerConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        self.camera.validate()?;
        self.profile.validate()?;
        self.controller.validate()?;
        if !(self.robot.length > 0.0) {
            return Err(Error::Config("robot length must be positive".into()));
        }
        Ok(())
    }
}

/// Logged at the GNSS antenna. The first sample carrying a state label is
/// that state's anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub state: SwitchState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub state: SwitchState,
    pub t: f64,
    /// True body-centre pose.
    pub pose: Pose2D,
    /// Odometric body-centre pose.
    pub est: Pose2D,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub spec: TrialSpec,
    pub target_row: usize,
    pub final_state: SwitchState,
    pub trajectory: Vec<TrajectorySample>,
    pub anchors: Vec<Anchor>,
    pub transitions: Vec<TransitionRecord>,
    pub d_r: Option<f64>,
    pub reentry: Option<ReentryResult>,
    /// Heading relative to the row when A fired, before any injected error (rad).
    pub heading_error_at_a: Option<f64>,
}

impl TrialResult {
    pub fn success(&self) -> bool {
        self.final_state == SwitchState::G
    }

    pub fn failure(&self) -> Option<FailReason> {
        match self.final_state {
            SwitchState::Failed(r) => Some(r),
            _ => None,
        }
    }

    pub fn anchor(&self, state: SwitchState) -> Option<&Anchor> {
        self.anchors.iter().find(|a| a.state == state)
    }

    pub fn transition(&self, to: SwitchState) -> Option<&TransitionRecord> {
        self.transitions.iter().find(|r| r.to == to)
    }
}

struct Sim<'a> {
    setup: &'a Setup,
    scorer: &'a dyn SceneScorer,
    heading: &'a dyn HeadingSource,
    rng: ChaCha8Rng,
    truth: Pose2D,
    est: Pose2D,
    odo: Odometer,
    t: f64,
    steps: u64,
    perception_every: u64,
    fsm: StateMachine,
    trajectory: Vec<TrajectorySample>,
    last_log: f64,
    anchors: Vec<Anchor>,
    transitions: Vec<TransitionRecord>,
    body_frame: CameraFrame,
}

fn gauss(rng: &mut ChaCha8Rng, mean: f64, std: f64) -> f64 {
    if std > 0.0 {
        Normal::new(mean, std).expect("finite std").sample(rng)
    } else {
        mean
    }
}

impl<'a> Sim<'a> {
    fn new(
        setup: &'a Setup,
        scorer: &'a dyn SceneScorer,
        heading: &'a dyn HeadingSource,
        seed: u64,
        start: Pose2D,
        state: SwitchState,
    ) -> Self {
        let c = &setup.controller;
        let mut sim = Self {
            setup,
            scorer,
            heading,
            rng: ChaCha8Rng::seed_from_u64(seed),
            truth: start,
            est: start,
            odo: Odometer::new(setup.profile.odometry.clone()),
            t: 0.0,
            steps: 0,
            perception_every: ((c.perception_period / c.dt).round() as u64).max(1),
            fsm: StateMachine::new(state),
            trajectory: Vec::new(),
            last_log: 0.0,
            anchors: Vec::new(),
            transitions: Vec::new(),
            body_frame: setup.camera.frame(&setup.robot.camera_mount),
        };
        sim.mark_anchor();
        sim
    }

    fn state(&self) -> SwitchState {
        self.fsm.state()
    }

    fn log(&mut self) {
        let g = self.setup.robot.gnss_position(&self.truth);
        self.trajectory.push(TrajectorySample {
            t: self.t,
            x: g.x,
            y: g.y,
            theta: self.truth.theta,
            state: self.fsm.state(),
        });
        self.last_log = self.t;
    }

    fn mark_anchor(&mut self) {
        self.anchors.push(Anchor {
            state: self.fsm.state(),
            t: self.t,
            pose: self.truth,
            est: self.est,
        });
        self.log();
    }

    fn enter(&mut self, s: SwitchState) -> Result<()> {
        self.fsm.advance(s)?;
        self.mark_anchor();
        Ok(())
    }

    fn fail(&mut self, reason: FailReason) -> Result<()> {
        self.enter(SwitchState::Failed(reason))
    }

    fn step(&mut self, cmd: Twist, dt: f64) {
        let p = &self.setup.profile;
        let rough = self.setup.field.roughness_at(self.truth.position()) * p.roughness_gain;
        self.truth = step_true(&p.odometry, &self.truth, cmd, dt, rough, &mut self.rng);
        self.est = self.odo.step(&self.est, cmd, dt);
        self.t += dt;
        self.steps += 1;
        if self.t - self.last_log >= self.setup.controller.log_period - 1e-9 {
            self.log();
        }
    }

    fn perception_due(&self) -> bool {
        self.steps % self.perception_every == 0
    }

    fn camera_pose(&self) -> Pose2D {
        self.setup.robot.camera_pose(&self.truth)
    }

    fn observe(&mut self) -> Result<SegMask> {
        let mut mask = render_mask(&self.setup.field, &self.camera_pose(), &self.setup.camera)?;
        apply_mask_noise(&mut mask, &self.setup.profile.mask, &mut self.rng);
        Ok(mask)
    }

    fn noisy_heading(&mut self, mut row: RowEstimate) -> RowEstimate {
        let std = self.setup.profile.follower_heading_noise_deg.to_radians();
        row.heading += gauss(&mut self.rng, 0.0, std);
        row
    }

    fn coast(&mut self, cmd: Twist, duration: f64) {
        let dt = self.setup.controller.dt;
        let mut left = duration;
        while left > 1e-12 {
            let h = left.min(dt);
            self.step(cmd, h);
            left -= h;
        }
    }

    /// Straight drive until odometry reports `target` metres, then the stop latency.
    fn drive(&mut self, target: f64) -> (f64, f64) {
        let c = &self.setup.controller;
        let (v, dt) = (c.v_switch, c.dt);
        self.odo.begin_segment(&mut self.rng);
        let (start_true, start_est) = (self.truth.position(), self.est.position());
        let target = target.max(0.0);
        let cmd = Twist::new(v, 0.0);
        loop {
            let remaining = target - (self.est.position() - start_est).norm();
            let rate = v * self.odo.trans_scale();
            if remaining <= 1e-12 || rate <= 0.0 {
                break;
            }
            let h = if rate * dt >= remaining { remaining / rate } else { dt };
            self.step(cmd, h);
        }
        self.coast(cmd, self.setup.profile.stop_latency_s);
        (
            (self.truth.position() - start_true).norm(),
            (self.est.position() - start_est).norm(),
        )
    }

    /// In-place quarter turn judged by odometry; returns (true, odometric) angle.
    fn rotate(&mut self, turn: Turn, extra_bias: f64) -> (f64, f64) {
        let c = &self.setup.controller;
        let (w, dt) = (c.omega, c.dt);
        self.odo.begin_segment(&mut self.rng);
        self.odo.bias_rotation(extra_bias);
        let cmd = Twist::new(0.0, w * turn.sign());
        let (mut turned_true, mut turned_odo) = (0.0, 0.0);
        let at = self.state();
        loop {
            let remaining = FRAC_PI_2 - self.heading.turned(at, turned_true, turned_odo);
            let rate = w * self.odo.rot_scale();
            if remaining <= 1e-12 || rate <= 0.0 {
                break;
            }
            let h = if rate * dt >= remaining { remaining / rate } else { dt };
            self.step(cmd, h);
            turned_true += w * h;
            turned_odo += rate * h;
        }
        (turned_true, turned_odo)
    }

    fn record(&mut self, to: SwitchState, commanded: f64, achieved_true: f64, achieved_odom: f64, error: f64, unit: Unit) {
        self.transitions.push(TransitionRecord {
            from: self.state(),
            to,
            commanded,
            achieved_true,
            achieved_odom,
            error,
            unit,
        });
    }

    /// Follows the current row until A fires. Returns the mask and detection
    /// that fired it.
    fn run_in_row(&mut self) -> Result<Option<(SegMask, EorDetection)>> {
        let c = self.setup.controller.clone();
        let robot = &self.setup.robot;
        let front_offset = robot.length / 2.0 - robot.camera_mount.x;
        let mut omega = 0.0;
        let mut lost = 0.0;
        loop {
            let mut seen = true;
            if self.perception_due() {
                let mask = self.observe()?;
                match central_trace(&mask, &c.eor) {
                    Some(trace) => {
                        if let Some(row) = estimate_from_pixels(&trace.pixels, &self.setup.camera, &self.body_frame) {
                            let row = self.noisy_heading(row);
                            omega = steer(&row, &c.follower);
                        }
                        let eor = eor_from_trace(&trace, &c.eor);
                        if let Some(d) = eor_ground_distance(&self.setup.camera, &eor) {
                            if d - front_offset < c.trigger_range {
                                return Ok(Some((mask, eor)));
                            }
                        }
                    }
                    None => {
                        seen = false;
                        omega = 0.0;
                    }
                }
            } else if lost > 0.0 {
                seen = false;
            }
            self.step(Twist::new(c.v_in_row, omega), c.dt);
            lost = if seen { 0.0 } else { lost + c.v_in_row * c.dt };
            let front = self.setup.robot.front_edge(&self.truth);
            if lost > c.lost_row_distance || self.setup.field.depth_past_eor(front) > c.lost_row_distance {
                self.fail(FailReason::LostRow)?;
                return Ok(None);
            }
        }
    }

    /// Row follower from F until the robot is `entry_depth` into the field.
    fn run_entry(&mut self, target: usize, turn: Turn) -> Result<()> {
        let c = self.setup.controller.clone();
        let gate = 0.5 * self.setup.field.nominal_inter_row;
        let mut tracker = RowTracker::default();
        let start = self.truth.position();
        let mut omega = 0.0;
        let mut lost = 0.0;
        let mut first = true;
        loop {
            if self.perception_due() || first {
                let mask = self.observe()?;
                let candidates = row_candidates(&mask, &self.setup.camera, &self.body_frame, &c.follower);
                if first && candidates.is_empty() {
                    return self.fail(FailReason::NoRowInView);
                }
                first = false;
                match tracker.update(&candidates, &self.est, gate) {
                    Some(row) => {
                        lost = 0.0;
                        let row = self.noisy_heading(row);
                        omega = steer(&row, &c.follower);
                    }
                    None => {
                        lost += c.v_switch * c.dt * self.perception_every as f64;
                        if let Some(row) = tracker.predicted(&self.est) {
                            omega = steer(&row, &c.follower);
                        }
                    }
                }
            }
            self.step(Twist::new(c.v_switch, omega), c.dt);
            if lost > c.lost_row_distance || (self.truth.position() - start).norm() > c.max_entry_travel {
                return self.fail(FailReason::LostRow);
            }
            if -self.setup.field.depth_past_eor(self.truth.position()) >= c.entry_depth {
                break;
            }
        }
        let p = self.truth.position();
        if self.setup.field.corridor_of(p) == Some(target) {
            return self.enter(SwitchState::G);
        }
        let side = self.setup.field.rows[target].line().signed_distance(p) * turn.sign();
        self.fail(if side > 0.0 { FailReason::SkipRow } else { FailReason::SameRow })
    }
}

fn start_pose(setup: &Setup, spec: &TrialSpec) -> Result<Pose2D> {
    let row = setup.field.row(spec.row)?;
    let dir = row.direction();
    let left = Vec2::new(-dir.y, dir.x);
    let centre = row.end - dir * (setup.controller.start_distance + setup.robot.length / 2.0) + left * spec.options.start_offset;
    let heading = dir.y.atan2(dir.x) + spec.options.start_heading_deg.to_radians();
    Ok(Pose2D::new(centre.x, centre.y, heading))
}

/// Heading change the controller trusts while turning in place. The default
/// is wheel odometry; an IMU-fused estimate can be plugged in here.
pub trait HeadingSource: Send + Sync {
    /// `at` is the state the rotation starts from (C or E).
    fn turned(&self, at: SwitchState, turned_true: f64, turned_odometry: f64) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdometryHeading;

impl HeadingSource for OdometryHeading {
    fn turned(&self, _at: SwitchState, _turned_true: f64, turned_odometry: f64) -> f64 {
        turned_odometry
    }
}

/// Runs one trial with the default geometric scene scorer.
pub fn run_trial(setup: &Setup, spec: &TrialSpec) -> Result<TrialResult> {
    let scorer = FootprintScorer {
        camera: setup.camera.clone(),
    };
    run_trial_with(setup, spec, &scorer)
}

pub fn run_trial_with(setup: &Setup, spec: &TrialSpec, scorer: &dyn SceneScorer) -> Result<TrialResult> {
    run_trial_hooked(setup, spec, scorer, &OdometryHeading)
}

pub fn run_trial_hooked(
    setup: &Setup,
    spec: &TrialSpec,
    scorer: &dyn SceneScorer,
    heading: &dyn HeadingSource,
) -> Result<TrialResult> {
    let target = spec
        .turn
        .target_row(spec.row, setup.field.rows.len())
        .ok_or_else(|| Error::Argument(format!("row {} has no neighbour on the {} side", spec.row, spec.turn)))?;
    let start = start_pose(setup, spec)?;
    let mut sim = Sim::new(setup, scorer, heading, spec.seed, start, SwitchState::InRow);
    let mut extra = Extra::default();
    run_switch(&mut sim, spec, target, &mut extra)?;
    log::debug!(
        "trial row {} {} seed {}: {} after {:.1}s",
        spec.row,
        spec.turn,
        spec.seed,
        sim.state(),
        sim.t
    );
    Ok(TrialResult {
        spec: spec.clone(),
        target_row: target,
        final_state: sim.state(),
        trajectory: sim.trajectory,
        anchors: sim.anchors,
        transitions: sim.transitions,
        d_r: extra.d_r,
        reentry: extra.reentry,
        heading_error_at_a: extra.heading_error_at_a,
    })
}

#[derive(Default)]
struct Extra {
    d_r: Option<f64>,
    reentry: Option<ReentryResult>,
    heading_error_at_a: Option<f64>,
}

fn run_switch(sim: &mut Sim<'_>, spec: &TrialSpec, target: usize, extra: &mut Extra) -> Result<()> {
    let setup = sim.setup;
    let c = &setup.controller;
    let profile = &setup.profile;
    let robot = &setup.robot;
    let cam = &setup.camera;
    let field = &setup.field;
    let turn = spec.turn;

    // InRow -> A
    let Some((trigger_mask, trigger_eor)) = sim.run_in_row()? else {
        return Ok(());
    };
    sim.enter(SwitchState::A)?;
    let row_dir = field.rows[spec.row].direction();
    extra.heading_error_at_a = Some(wrap_angle(sim.truth.theta - row_dir.y.atan2(row_dir.x)));
    let injected = spec.options.heading_error_at_a_deg.to_radians()
        + gauss(&mut sim.rng, 0.0, profile.heading_at_a_std_deg.to_radians());
    if injected != 0.0 {
        sim.truth = Pose2D::new(sim.truth.x, sim.truth.y, sim.truth.theta + injected);
        sim.anchors.last_mut().expect("A anchor").pose = sim.truth;
        sim.trajectory.last_mut().expect("A sample").theta = sim.truth.theta;
    }
    let (mask, eor) = if injected != 0.0 {
        let m = sim.observe()?;
        let e = detect_eor_with(&m, &c.eor);
        if e.valid {
            (m, e)
        } else {
            (trigger_mask, trigger_eor)
        }
    } else {
        (trigger_mask, trigger_eor)
    };
    let reference = match ReferenceScene::capture(&mask, &eor, cam, &sim.camera_pose(), &c.reference) {
        Ok(r) => r,
        Err(Error::State(_) | Error::DetectionUnavailable(_)) => return sim.fail(FailReason::EorStopTimeout),
        Err(e) => return Err(e),
    };
    let depth: DepthImage = render_depth(cam)?;
    let reentry = locate_reentry(&mask, &depth, &eor, cam, turn)?;
    if reentry.valid {
        let lateral = robot.camera_mount.transform_point(reentry.r_ground_vec()).y * turn.sign();
        extra.d_r = Some(lateral + profile.dr_bias + gauss(&mut sim.rng, 0.0, profile.dr_noise_std));
    }
    extra.reentry = Some(reentry);

    // A -> B
    let persistence = gauss(&mut sim.rng, profile.persistence_mean, profile.persistence_std);
    sim.odo.begin_segment(&mut sim.rng);
    let start_est = sim.est.position();
    let cmd = Twist::new(c.v_switch, 0.0);
    loop {
        sim.step(cmd, c.dt);
        let cp = sim.camera_pose();
        let seen_from = Pose2D::new(cp.x - cp.theta.cos() * persistence, cp.y - cp.theta.sin() * persistence, cp.theta);
        let score = (sim.scorer.score(&reference, &seen_from) + gauss(&mut sim.rng, 0.0, profile.score_noise_std)).clamp(0.0, 1.0);
        if score < c.score_threshold {
            break;
        }
        if (sim.est.position() - start_est).norm() >= c.max_exit_travel {
            return sim.fail(FailReason::EorStopTimeout);
        }
    }
    sim.coast(cmd, profile.stop_latency_s);
    let overshoot = field.depth_past_eor(robot.front_edge(&sim.truth));
    let odom = (sim.est.position() - start_est).norm();
    sim.record(SwitchState::B, 0.0, overshoot, odom, overshoot, Unit::M);
    sim.enter(SwitchState::B)?;

    // B -> C
    let (t, o) = sim.drive(robot.length);
    sim.record(SwitchState::C, robot.length, t, o, t - robot.length, Unit::M);
    sim.enter(SwitchState::C)?;

    // C -> D
    let (t, o) = sim.rotate(turn, 0.0);
    sim.record(SwitchState::D, FRAC_PI_2, t, o, t - FRAC_PI_2, Unit::Rad);
    sim.enter(SwitchState::D)?;

    // D -> E
    let Some(d_r) = extra.d_r else {
        return sim.fail(FailReason::NoDr);
    };
    let (t, o) = sim.drive(d_r);
    sim.record(SwitchState::E, d_r, t, o, t - d_r, Unit::M);
    sim.enter(SwitchState::E)?;

    // E -> F
    let (t, o) = sim.rotate(turn, profile.second_turn_bias_per_rad);
    sim.record(SwitchState::F, FRAC_PI_2, t, o, t - FRAC_PI_2, Unit::Rad);
    sim.enter(SwitchState::F)?;

    // F -> G
    sim.run_entry(target, turn)
}

/// Nominal F pose for re-entering `target` after a `turn`: facing back into
/// the field with the front edge on the EOR line, `offset` metres from the
/// row line (positive = further along the turn direction) and `heading_deg`
/// from the row-facing direction (counter-clockwise positive).
pub fn f_pose(setup: &Setup, target: usize, turn: Turn, offset: f64, heading_deg: f64) -> Result<Pose2D> {
    let row = setup.field.row(target)?;
    let dir = row.direction();
    let left = Vec2::new(-dir.y, dir.x);
    let centre = row.end + dir * (setup.robot.length / 2.0) + left * (offset * turn.sign());
    let heading = (-dir.y).atan2(-dir.x) + heading_deg.to_radians();
    Ok(Pose2D::new(centre.x, centre.y, heading))
}

/// Runs only F -> G from an injected F pose.
pub fn run_reentry(setup: &Setup, f: Pose2D, origin_row: usize, turn: Turn, seed: u64) -> Result<TrialResult> {
    let target = turn
        .target_row(origin_row, setup.field.rows.len())
        .ok_or_else(|| Error::Argument(format!("row {origin_row} has no neighbour on the {turn} side")))?;
    let scorer = FootprintScorer {
        camera: setup.camera.clone(),
    };
    let mut sim = Sim::new(setup, &scorer, &OdometryHeading, seed, f, SwitchState::F);
    sim.run_entry(target, turn)?;
    Ok(TrialResult {
        spec: TrialSpec::new(origin_row, turn, seed),
        target_row: target,
        final_state: sim.state(),
        trajectory: sim.trajectory,
        anchors: sim.anchors,
        transitions: sim.transitions,
        d_r: None,
        reentry: None,
        heading_error_at_a: None,
    })
}
