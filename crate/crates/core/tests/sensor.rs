use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rowswitch::field::{generate_field, FieldConfig, FieldSpec};
use rowswitch::geometry::{point_segment_distance, Pose2D, Vec2};
use rowswitch::sensor::*;
use rowswitch::Error;

/// Pinhole camera written out by hand: world point of a pixel at optical
/// depth `z` for a camera at `pose`, `h` above ground, pitched down by `pitch`.
fn oracle_backproject(cam: &CameraModel, pose: &Pose2D, u: f64, v: f64, z: f64) -> [f64; 3] {
    let (s, c) = (pose.theta.sin(), pose.theta.cos());
    let (sp, cp) = cam.pitch_deg.to_radians().sin_cos();
    let right = [s, -c, 0.0];
    let down = [-c * sp, -s * sp, -cp];
    let fwd = [c * cp, s * cp, -sp];
    let xc = (u - cam.cx) / cam.fx * z;
    let yc = (v - cam.cy) / cam.fy * z;
    let o = [pose.x, pose.y, cam.mount_height];
    [0, 1, 2].map(|i| o[i] + xc * right[i] + yc * down[i] + z * fwd[i])
}

/// Pixel of a ground point, same hand-written camera.
fn oracle_project(cam: &CameraModel, pose: &Pose2D, p: Vec2) -> Option<(f64, f64)> {
    let (s, c) = (pose.theta.sin(), pose.theta.cos());
    let (sp, cp) = cam.pitch_deg.to_radians().sin_cos();
    let d = [p.x - pose.x, p.y - pose.y, -cam.mount_height];
    let dot = |a: [f64; 3]| a[0] * d[0] + a[1] * d[1] + a[2] * d[2];
    let (xc, yc, zc) = (dot([s, -c, 0.0]), dot([-c * sp, -s * sp, -cp]), dot([c * cp, s * cp, -sp]));
    (zc > 1e-9).then(|| (cam.cx + cam.fx * xc / zc, cam.cy + cam.fy * yc / zc))
}

fn regular() -> FieldSpec {
    generate_field(&FieldConfig::regular(10, 0.5), 0).unwrap()
}

fn near_row(field: &FieldSpec, p: Vec2) -> f64 {
    field
        .rows
        .iter()
        .flat_map(|r| r.planted_segments())
        .map(|(a, b)| point_segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn every_mask_pixel_back_projects_onto_a_row() {
    let cam = CameraModel::default();
    let field = generate_field(&FieldConfig::default(), 4).unwrap();
    for (k, pose) in [
        Pose2D::new(7.0, 1.5, 0.0),
        Pose2D::new(8.6, 2.1, 0.08),
        Pose2D::new(10.6, 1.9, std::f64::consts::PI),
        Pose2D::new(9.5, 0.2, 0.5),
    ]
    .iter()
    .enumerate()
    {
        let (mask, depth) = render(&field, pose, &cam).unwrap();
        assert!(!mask.is_empty(), "pose {k} sees nothing");
        for (u, v) in mask.pixels() {
            let z = depth.get(u, v);
            assert!(z > 0.0);
            let w = oracle_backproject(&cam, pose, u as f64, v as f64, z);
            assert!(w[2].abs() < 1e-4, "not on ground: {w:?}");
            let off = near_row(&field, Vec2::new(w[0], w[1]));
            assert!(off <= 0.01 + 1e-6, "pose {k} pixel ({u},{v}) is {off} m from any row");
        }
    }
}

#[test]
fn visible_rows_are_drawn_without_holes() {
    let cam = CameraModel::default();
    let field = regular();
    let pose = Pose2D::new(8.0, 2.0, 0.0);
    let mask = render_mask(&field, &pose, &cam).unwrap();
    let mut checked = 0;
    for r in &field.rows {
        for (a, b) in r.planted_segments() {
            let n = ((b - a).norm() / 0.01) as usize;
            for k in 0..=n {
                let p = a + (b - a) * (k as f64 / n as f64);
                let ahead = (p - pose.position()).dot(&pose.heading());
                if !(0.3..cam.max_range - 0.3).contains(&ahead) {
                    continue;
                }
                let Some((u, v)) = oracle_project(&cam, &pose, p) else { continue };
                let (u, v) = (u.round() as i64, v.round() as i64);
                if !(2..cam.width as i64 - 2).contains(&u) || !(2..cam.height as i64 - 2).contains(&v) {
                    continue;
                }
                let hit = (-1..=1).any(|du| (-1..=1).any(|dv| mask.value(u + du, v + dv) > 0));
                assert!(hit, "row {} point {p:?} at ({u},{v}) missing", r.index);
                checked += 1;
            }
        }
    }
    assert!(checked > 500);
}

#[test]
fn centred_robot_sees_centre_column() {
    let cam = CameraModel::default();
    let mask = render_mask(&regular(), &Pose2D::new(7.0, 2.0, 0.0), &cam).unwrap();
    let centre = cam.cx;
    for v in (cam.height / 2)..cam.height {
        let hits: Vec<u32> = (0..cam.width).filter(|&u| mask.get(u, v) && (u as f64 - centre).abs() < 20.0).collect();
        assert!(!hits.is_empty(), "row {v} missing the central skeleton");
        assert!(hits.iter().all(|&u| (u as f64 - centre).abs() <= 2.0));
    }
}

#[test]
fn deep_headland_renders_nothing() {
    let cam = CameraModel::default();
    let (mask, _) = render(&regular(), &Pose2D::new(11.5, 2.0, 0.0), &cam).unwrap();
    assert!(mask.is_empty());
}

#[test]
fn degenerate_camera_is_render_error() {
    let cam = CameraModel { mount_height: 0.0, ..CameraModel::default() };
    assert!(matches!(render(&regular(), &Pose2D::default(), &cam), Err(Error::Render(_))));
}

#[test]
fn eor_distance_within_five_cm() {
    let cam = CameraModel::default();
    let field = regular();
    let mut d = 0.5;
    while d <= 3.0 {
        let pose = Pose2D::new(10.0 - d, 2.0, 0.0);
        let mask = render_mask(&field, &pose, &cam).unwrap();
        let eor = detect_eor(&mask);
        assert!(eor.valid);
        let est = eor_ground_distance(&cam, &eor).unwrap();
        assert!((est - d).abs() <= 0.05, "at {d} m detected {est} m");
        d += 0.1;
    }
}

#[test]
fn empty_mask_is_invalid() {
    let cam = CameraModel::default();
    assert!(!detect_eor(&SegMask::new(cam.width, cam.height)).valid);
}

#[test]
fn similarity_crosses_threshold_near_eor() {
    let cam = CameraModel::default();
    let field = regular();
    let robot = rowswitch::robot::RobotSpec::default();
    let scorer = FootprintScorer { camera: cam.clone() };
    let start = Pose2D::new(10.0 - 1.5 - robot.length / 2.0, 2.0, 0.0);
    let cpose = robot.camera_pose(&start);
    let mask = render_mask(&field, &cpose, &cam).unwrap();
    let eor = detect_eor(&mask);
    let reference = ReferenceScene::capture(&mask, &eor, &cam, &cpose, &ReferenceConfig::default()).unwrap();
    assert_relative_eq!(similarity_score(&scorer, Some(&reference), &cpose).unwrap(), 1.0, epsilon = 1e-9);
    let mut prev = 1.0;
    let mut crossing = None;
    for k in 0..400 {
        let body = Pose2D::new(start.x + k as f64 * 0.005, start.y, 0.0);
        let s = scorer.score(&reference, &robot.camera_pose(&body));
        assert!(s <= prev + 1e-12, "score rose at step {k}");
        prev = s;
        if crossing.is_none() && s < 0.3 {
            crossing = Some(field.depth_past_eor(robot.front_edge(&body)));
        }
    }
    let crossing = crossing.expect("score never fell below threshold");
    assert!(crossing.abs() <= 0.10, "crossed {crossing} m from the EOR");
    assert_eq!(prev, 0.0);
}

#[test]
fn images_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cam = CameraModel::default();
    let (mask, depth) = render(&regular(), &Pose2D::new(8.5, 2.0, 0.0), &cam).unwrap();
    let (mp, dp, ip) = (dir.path().join("m.pgm"), dir.path().join("d.pgm"), dir.path().join("i.toml"));
    mask.save_pgm(&mp).unwrap();
    depth.save_pgm(&dp).unwrap();
    Intrinsics::new(cam.clone()).save(&ip).unwrap();
    assert_eq!(SegMask::load(&mp).unwrap(), mask);
    let back = DepthImage::load(&dp).unwrap();
    for v in 0..cam.height {
        for u in (0..cam.width).step_by(37) {
            assert!((back.get(u, v) - depth.get(u, v)).abs() <= 0.0005 + 1e-9);
        }
    }
    assert_eq!(Intrinsics::load(&ip).unwrap().camera, cam);
}

#[test]
fn mismatched_images_rejected() {
    let cam = CameraModel::default();
    let mask = SegMask::new(cam.width, cam.height);
    let depth = DepthImage::new(cam.width / 2, cam.height);
    assert!(matches!(check_dimensions(&mask, &depth, &cam), Err(Error::DimensionMismatch(_))));
}

#[test]
fn mask_noise_rate() {
    let mut mask = SegMask::new(200, 200);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    apply_mask_noise(&mut mask, &MaskNoise { flip_probability: 0.01, dilation: 0 }, &mut rng);
    let frac = mask.count() as f64 / 40_000.0;
    assert!((frac - 0.01).abs() < 0.002, "{frac}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eor_row_moves_down_while_approaching(y in 1.0f64..3.5, heading in -0.03f64..0.03, start in 2.0f64..3.0) {
        let cam = CameraModel::default();
        let field = regular();
        let row_y = (y / 0.5).round() * 0.5;
        let mut last = 0u32;
        let mut d = start;
        while d > 0.4 {
            let pose = Pose2D::new(10.0 - d, row_y + (y - row_y) * 0.2, heading);
            let eor = detect_eor(&render_mask(&field, &pose, &cam).unwrap());
            prop_assert!(eor.valid);
            prop_assert!(eor.image_row >= last, "{} then {}", last, eor.image_row);
            last = eor.image_row;
            d -= 0.05;
        }
    }

    #[test]
    fn score_is_one_at_capture_and_bounded(dx in -0.5f64..2.0, dy in -0.3f64..0.3, dth in -0.3f64..0.3) {
        let cam = CameraModel::default();
        let cpose = Pose2D::new(8.2, 2.0, 0.0);
        let mask = render_mask(&regular(), &cpose, &cam).unwrap();
        let eor = detect_eor(&mask);
        let r = ReferenceScene::capture(&mask, &eor, &cam, &cpose, &ReferenceConfig::default()).unwrap();
        let s = FootprintScorer { camera: cam };
        prop_assert!((s.score(&r, &cpose) - 1.0).abs() < 1e-9);
        let v = s.score(&r, &Pose2D::new(8.2 + dx, 2.0 + dy, dth));
        prop_assert!((0.0..=1.0).contains(&v));
    }
}
