//! Skid-steer platform modelled as a unicycle, plus the wheel-odometry
//! estimator the switching controller relies on.
//!
//! The true plant integrates the commanded twist exactly and, while turning on
//! rough ground, picks up a translational drift that odometry never sees.
//! Odometry scales each motion segment by a per-segment error drawn when the
//! segment starts (wheel radius, slip), so its error grows linearly with the
//! distance or angle of that segment.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::geometry::{wrap_angle, Pose2D, Vec2};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RobotSpec {
    /// Body length `L_R` (m).
    pub length: f64,
    pub width: f64,
    /// Camera position on the body, relative to the body centre.
    pub camera_mount: Pose2D,
    /// GNSS antenna distance behind the front edge (m).
    pub gnss_offset: f64,
}

impl Default for RobotSpec {
    fn default() -> Self {
        Self {
            length: 0.526,
            width: 0.507,
            // Places the camera so the bottom image row meets the ground at the
            // front edge with the default camera intrinsics and 27.5 deg pitch.
            camera_mount: Pose2D::new(0.053, 0.0, 0.0),
            gnss_offset: 0.45,
        }
    }
}

impl RobotSpec {
    pub fn front_edge(&self, pose: &Pose2D) -> Vec2 {
        pose.transform_point(Vec2::new(self.length / 2.0, 0.0))
    }

    pub fn gnss_position(&self, pose: &Pose2D) -> Vec2 {
        pose.transform_point(Vec2::new(self.length / 2.0 - self.gnss_offset, 0.0))
    }

    pub fn camera_pose(&self, pose: &Pose2D) -> Pose2D {
        pose.compose(&self.camera_mount)
    }

    /// `R` in the headland-width coefficient `(1 + R)`.
    pub fn gnss_ratio(&self) -> f64 {
        self.gnss_offset / self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Twist {
    pub v: f64,
    pub omega: f64,
}

impl Twist {
    pub fn new(v: f64, omega: f64) -> Self {
        Self { v, omega }
    }

    pub fn clamped(self, v_max: f64, omega_max: f64) -> Self {
        Self {
            v: self.v.clamp(-v_max, v_max),
            omega: self.omega.clamp(-omega_max, omega_max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct OdometryModel {
    /// Std of the odometry distance scale error (m per m travelled).
    pub trans_std_per_m: f64,
    /// Std of the odometry heading scale error (rad per rad turned).
    pub rot_std_per_rad: f64,
    /// Drift RMS (m) per rad of rotation per unit roughness.
    pub rot_drift_gain: f64,
    /// Mean odometry distance scale error.
    pub trans_bias_per_m: f64,
    /// Mean odometry heading scale error; positive means odometry over-reports turning.
    pub rot_bias_per_rad: f64,
}

impl OdometryModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn is_noiseless(&self) -> bool {
        *self == Self::default()
    }
}

/// Exact unicycle update without disturbances.
pub fn integrate(pose: &Pose2D, cmd: Twist, dt: f64) -> Pose2D {
    let dtheta = cmd.omega * dt;
    let (x, y) = if dtheta.abs() < 1e-12 {
        (
            pose.x + cmd.v * dt * pose.theta.cos(),
            pose.y + cmd.v * dt * pose.theta.sin(),
        )
    } else {
        let r = cmd.v / cmd.omega;
        let t1 = pose.theta + dtheta;
        (
            pose.x + r * (t1.sin() - pose.theta.sin()),
            pose.y - r * (t1.cos() - pose.theta.cos()),
        )
    };
    Pose2D::new(x, y, pose.theta + dtheta)
}

/// True-plant step: exact unicycle motion plus, while rotating, an isotropic
/// drift whose RMS magnitude is `rot_drift_gain * |omega| dt * roughness`.
pub fn step_true<R: Rng + ?Sized>(
    model: &OdometryModel,
    pose: &Pose2D,
    cmd: Twist,
    dt: f64,
    roughness: f64,
    rng: &mut R,
) -> Pose2D {
    debug_assert!(dt > 0.0);
    let mut next = integrate(pose, cmd, dt);
    let rms = model.rot_drift_gain * cmd.omega.abs() * dt * roughness.max(0.0);
    if rms > 0.0 {
        let axis = Normal::new(0.0, rms / std::f64::consts::SQRT_2).expect("finite std");
        next.x += axis.sample(rng);
        next.y += axis.sample(rng);
    }
    next
}

/// Wheel-odometry estimator with per-segment scale errors.
#[derive(Debug, Clone)]
pub struct Odometer {
    model: OdometryModel,
    trans_scale: f64,
    rot_scale: f64,
}

impl Odometer {
    pub fn new(model: OdometryModel) -> Self {
        Self {
            trans_scale: 1.0 + model.trans_bias_per_m,
            rot_scale: 1.0 + model.rot_bias_per_rad,
            model,
        }
    }

    pub fn model(&self) -> &OdometryModel {
        &self.model
    }

    /// Draws fresh scale errors for the next motion segment.
    pub fn begin_segment<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.trans_scale = 1.0 + self.model.trans_bias_per_m + gauss(rng, self.model.trans_std_per_m);
        self.rot_scale = 1.0 + self.model.rot_bias_per_rad + gauss(rng, self.model.rot_std_per_rad);
    }

    /// Shifts the current segment's heading scale error.
    pub fn bias_rotation(&mut self, delta: f64) {
        self.rot_scale += delta;
    }

    pub fn trans_scale(&self) -> f64 {
        self.trans_scale
    }

    pub fn rot_scale(&self) -> f64 {
        self.rot_scale
    }

    /// Dead-reckons the commanded motion as the wheels report it.
    pub fn step(&self, est: &Pose2D, cmd: Twist, dt: f64) -> Pose2D {
        integrate(
            est,
            Twist::new(cmd.v * self.trans_scale, cmd.omega * self.rot_scale),
            dt,
        )
    }
}

/// Free-function form of [`Odometer::step`].
pub fn step_odom(odometer: &Odometer, est: &Pose2D, cmd: Twist, dt: f64) -> Pose2D {
    odometer.step(est, cmd, dt)
}

fn gauss<R: Rng + ?Sized>(rng: &mut R, std: f64) -> f64 {
    if std > 0.0 {
        Normal::new(0.0, std).expect("finite std").sample(rng)
    } else {
        0.0
    }
}

/// Heading change between two poses along the shortest arc.
pub fn heading_change(from: &Pose2D, to: &Pose2D) -> f64 {
    wrap_angle(to.theta - from.theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn straight_drive() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = step_true(&OdometryModel::default(), &Pose2D::default(), Twist::new(1.0, 0.0), 1.0, 0.0, &mut rng);
        assert_relative_eq!(p.x, 1.0);
        assert_relative_eq!(p.y, 0.0);
        assert_relative_eq!(p.theta, 0.0);
    }

    #[test]
    fn pure_rotation_without_roughness_stays_put() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let model = OdometryModel { rot_drift_gain: 0.1, ..Default::default() };
        let p = step_true(&model, &Pose2D::default(), Twist::new(0.0, FRAC_PI_2), 1.0, 0.0, &mut rng);
        assert_eq!((p.x, p.y), (0.0, 0.0));
        assert_relative_eq!(p.theta, FRAC_PI_2);
    }

    #[test]
    fn drift_rms_matches_gain() {
        let model = OdometryModel { rot_drift_gain: 0.1, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 10_000;
        let mean_sq: f64 = (0..n)
            .map(|_| {
                let p = step_true(&model, &Pose2D::default(), Twist::new(0.0, FRAC_PI_2), 1.0, 1.0, &mut rng);
                p.x * p.x + p.y * p.y
            })
            .sum::<f64>()
            / n as f64;
        let expected = 0.1 * FRAC_PI_2;
        assert!((mean_sq.sqrt() - expected).abs() / expected < 0.05, "{}", mean_sq.sqrt());
    }

    #[test]
    fn noiseless_odometry_tracks_command() {
        let odo = Odometer::new(OdometryModel::noiseless());
        let est = odo.step(&Pose2D::default(), Twist::new(1.0, 0.0), 1.0);
        assert_relative_eq!(est.x, 1.0);
    }

    #[test]
    fn odometry_distance_std_scales_with_distance() {
        let model = OdometryModel { trans_std_per_m: 0.01, ..Default::default() };
        let mut odo = Odometer::new(model);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 10_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                odo.begin_segment(&mut rng);
                let mut est = Pose2D::default();
                for _ in 0..200 {
                    est = odo.step(&est, Twist::new(1.0, 0.0), 0.05);
                }
                est.x
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std = (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        assert!((std - 0.1).abs() / 0.1 < 0.05, "std {std}");
    }

    #[test]
    fn odometry_blind_to_rotation_drift() {
        let model = OdometryModel { rot_drift_gain: 0.2, ..Default::default() };
        let odo = Odometer::new(model.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (mut truth, mut est) = (Pose2D::default(), Pose2D::default());
        let cmd = Twist::new(0.0, 0.5);
        for _ in 0..63 {
            truth = step_true(&model, &truth, cmd, 0.05, 1.0, &mut rng);
            est = odo.step(&est, cmd, 0.05);
        }
        assert_relative_eq!(truth.theta, est.theta, epsilon = 1e-12);
        assert!(truth.position().norm() > 1e-3);
        assert_eq!(est.position().norm(), 0.0);
    }

    #[test]
    fn heading_stays_wrapped() {
        let mut p = Pose2D::default();
        for _ in 0..1000 {
            p = integrate(&p, Twist::new(0.1, 3.0), 0.05);
            assert!(p.theta > -std::f64::consts::PI && p.theta <= std::f64::consts::PI);
        }
    }
}
