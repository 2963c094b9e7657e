use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rowswitch::geometry::Pose2D;
use rowswitch::robot::*;

#[test]
fn arc_matches_circle_geometry() {
    // v = 0.3, omega = 0.5 for 2 s: a circular arc of radius 0.6 about (0, 0.6).
    let (v, w, t) = (0.3, 0.5, 2.0);
    let r = v / w;
    let mut p = Pose2D::new(0.0, 0.0, 0.0);
    for _ in 0..40 {
        p = integrate(&p, Twist::new(v, w), t / 40.0);
    }
    let phi = w * t;
    assert_relative_eq!(p.x, r * phi.sin(), epsilon = 1e-12);
    assert_relative_eq!(p.y, r - r * phi.cos(), epsilon = 1e-12);
    assert_relative_eq!(p.theta, phi, epsilon = 1e-12);
}

#[test]
fn odometry_distance_spread_scales_with_distance() {
    let model = OdometryModel { trans_std_per_m: 0.01, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 10_000;
    let samples: Vec<f64> = (0..n)
        .map(|_| {
            let mut odo = Odometer::new(model.clone());
            odo.begin_segment(&mut rng);
            let mut est = Pose2D::default();
            for _ in 0..100 {
                est = odo.step(&est, Twist::new(1.0, 0.0), 0.1);
            }
            est.x
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let std = (samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    assert!((std - 0.1).abs() / 0.1 < 0.05, "std {std}");
}

#[test]
fn drift_is_invisible_to_odometry() {
    let model = OdometryModel { rot_drift_gain: 0.1, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let odo = Odometer::new(model.clone());
    let (mut truth, mut est) = (Pose2D::default(), Pose2D::default());
    let cmd = Twist::new(0.0, 0.5);
    for _ in 0..20 {
        truth = step_true(&model, &truth, cmd, 0.1, 1.0, &mut rng);
        est = step_odom(&odo, &est, cmd, 0.1);
    }
    assert!(truth.position().norm() > 1e-4);
    assert_eq!(est.position().norm(), 0.0);
    assert_relative_eq!(est.theta, 1.0, epsilon = 1e-12);
    assert_relative_eq!(heading_change(&Pose2D::default(), &est), truth.theta, epsilon = 1e-12);
}

#[test]
fn drift_magnitude_matches_gain() {
    let model = OdometryModel { rot_drift_gain: 0.1, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 10_000;
    let mags: Vec<f64> = (0..n)
        .map(|_| step_true(&model, &Pose2D::default(), Twist::new(0.0, FRAC_PI_2), 1.0, 1.0, &mut rng).position().norm())
        .collect();
    let rms = (mags.iter().map(|m| m * m).sum::<f64>() / n as f64).sqrt();
    assert!((rms - 0.1 * FRAC_PI_2).abs() / (0.1 * FRAC_PI_2) < 0.05, "rms {rms}");
}

#[test]
fn seeded_runs_repeat() {
    let model = OdometryModel { rot_drift_gain: 0.2, trans_std_per_m: 0.05, rot_std_per_rad: 0.1, ..Default::default() };
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut p = Pose2D::default();
        for k in 0..50 {
            p = step_true(&model, &p, Twist::new(0.2, if k % 2 == 0 { 0.4 } else { -0.1 }), 0.05, 0.7, &mut rng);
        }
        p
    };
    assert_eq!(run(), run());
}

#[test]
fn default_spec_matches_platform() {
    let r = RobotSpec::default();
    assert_eq!((r.length, r.width, r.gnss_offset), (0.526, 0.507, 0.45));
    let p = Pose2D::new(1.0, 2.0, FRAC_PI_2);
    assert_relative_eq!((r.front_edge(&p) - r.gnss_position(&p)).norm(), 0.45, epsilon = 1e-12);
}

proptest! {
    #[test]
    fn noiseless_plant_and_odometry_agree(cmds in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0.01f64..0.2), 1..60)) {
        let model = OdometryModel::noiseless();
        let odo = Odometer::new(model.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (mut t, mut e) = (Pose2D::default(), Pose2D::default());
        for (v, w, dt) in cmds {
            t = step_true(&model, &t, Twist::new(v, w), dt, 0.0, &mut rng);
            e = odo.step(&e, Twist::new(v, w), dt);
            prop_assert!((t.x - e.x).abs() < 1e-12 && (t.y - e.y).abs() < 1e-12 && (t.theta - e.theta).abs() < 1e-12);
        }
    }

    #[test]
    fn heading_stays_wrapped(cmds in prop::collection::vec((-3.0f64..3.0, 0.05f64..2.0), 1..40), rough in 0.0f64..1.0) {
        let model = OdometryModel { rot_drift_gain: 0.1, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut p = Pose2D::default();
        for (w, dt) in cmds {
            p = step_true(&model, &p, Twist::new(0.1, w), dt, rough, &mut rng);
            prop_assert!(p.theta > -PI && p.theta <= PI);
        }
    }
}
