use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rowswitch::field::{generate_field, FieldConfig, FieldSpec};
use rowswitch::geometry::Pose2D;
use rowswitch::reentry::*;
use rowswitch::robot::RobotSpec;
use rowswitch::sensor::*;
use rowswitch::Error;

mod common;
use common::{oracle_argmax, oracle_pixels};

fn small_camera() -> CameraModel {
    CameraModel {
        width: 160,
        height: 120,
        fx: 115.0,
        fy: 115.0,
        cx: 79.5,
        cy: 59.5,
        ..CameraModel::default()
    }
}

fn field() -> FieldSpec {
    generate_field(&FieldConfig::regular(10, 0.5), 0).unwrap()
}

/// Camera pose of a robot whose front edge is `before` metres short of the
/// EOR on row 4, `offset` metres to its left.
fn camera_at(before: f64, offset: f64, heading: f64) -> Pose2D {
    let robot = RobotSpec::default();
    let body = Pose2D::new(10.0 - before - robot.length / 2.0, 2.0 + offset, heading);
    robot.camera_pose(&body)
}

#[test]
fn rasterizer_matches_direct_rounding() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5000 {
        let a = (rng.random_range(-40..200), rng.random_range(-40..160));
        let b = (rng.random_range(-40..200), rng.random_range(-40..160));
        assert_eq!(line_pixels(a, b), oracle_pixels(a, b), "{a:?} -> {b:?}");
    }
}

#[test]
fn sequential_scans_match_exhaustive_oracle() {
    let cam = small_camera();
    let f = field();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut compared = 0;
    for k in 0..60 {
        let pose = camera_at(rng.random_range(0.8..2.5), rng.random_range(-0.08..0.08), rng.random_range(-0.06..0.06));
        let mut mask = render_mask(&f, &pose, &cam).unwrap();
        apply_mask_noise(&mut mask, &MaskNoise { flip_probability: 0.002, dilation: 0 }, &mut rng);
        let eor = detect_eor(&mask);
        let turn = if k % 2 == 0 { Turn::Left } else { Turn::Right };
        let Ok(roi) = build_roi(&mask, &eor, turn) else { continue };
        let trace = central_trace(&mask, &EorConfig::default()).unwrap();
        let scanned = scan_mask(&mask, &trace, 1);
        let expected_pt = oracle_argmax(&scanned, roi.a, &roi.corner_path);
        let got_pt = scan_pt(&scanned, roi.a, &roi).ok().map(|h| h.point);
        assert_eq!(got_pt, expected_pt, "mask {k}");
        if let Some(p_t) = got_pt {
            let expected_at = oracle_argmax(&scanned, p_t, &roi.top_segment);
            assert_eq!(scan_at(&scanned, p_t, &roi).ok().map(|h| h.point), expected_at, "mask {k}");
            compared += 1;
        }
    }
    assert!(compared >= 50, "only {compared} masks had a scan");
}

#[test]
fn mirrored_input_mirrors_output() {
    let cam = CameraModel::default();
    let f = field();
    let depth = render_depth(&cam).unwrap();
    for (before, offset) in [(1.5, 0.0), (1.2, 0.05), (2.0, -0.04)] {
        let mask = render_mask(&f, &camera_at(before, offset, 0.0), &cam).unwrap();
        let mirror = mask.mirrored();
        let (eor, eor_m) = (detect_eor(&mask), detect_eor(&mirror));
        assert_eq!(eor, eor_m);
        let r = locate_reentry(&mask, &depth, &eor, &cam, Turn::Right).unwrap();
        let m = locate_reentry(&mirror, &depth.mirrored(), &eor_m, &cam, Turn::Left).unwrap();
        assert!(r.valid && m.valid);
        let flip = |p: Px| (cam.width as i64 - 1 - p.0, p.1);
        assert_eq!(flip(r.p_t), m.p_t);
        assert_eq!(flip(r.a_t), m.a_t);
        assert!((r.d_r - m.d_r).abs() < 1e-9);
        assert_eq!(r.roi.unwrap().mirrored(cam.width), m.roi.unwrap());
    }
}

#[test]
fn scan_points_lie_in_roi() {
    let cam = CameraModel::default();
    let f = field();
    let depth = render_depth(&cam).unwrap();
    for turn in [Turn::Left, Turn::Right] {
        for before in [1.0, 1.5, 2.0] {
            let mask = render_mask(&f, &camera_at(before, 0.03, 0.02), &cam).unwrap();
            let r = locate_reentry(&mask, &depth, &detect_eor(&mask), &cam, turn).unwrap();
            let roi = r.roi.as_ref().unwrap();
            assert!(roi.contains(r.p_t) && roi.contains(r.a_t));
            assert!(r.r_px[0] >= 0.0 && r.r_px[0] <= cam.width as f64 - 1.0);
        }
    }
}

#[test]
fn d_r_is_row_spacing_when_centred() {
    let cam = CameraModel::default();
    let f = field();
    let depth = render_depth(&cam).unwrap();
    for turn in [Turn::Left, Turn::Right] {
        for before in [1.0, 1.25, 1.5] {
            let mask = render_mask(&f, &camera_at(before, 0.0, 0.0), &cam).unwrap();
            let r = locate_reentry(&mask, &depth, &detect_eor(&mask), &cam, turn).unwrap();
            assert!(r.valid, "{turn} at {before}: {:?}", r.reason);
            assert!((r.d_r - 0.5).abs() <= 0.03, "{turn} at {before}: d_r {}", r.d_r);
        }
    }
}

#[test]
fn d_r_shrinks_with_offset_toward_target() {
    let cam = CameraModel::default();
    let mask = render_mask(&field(), &camera_at(1.5, 0.1, 0.0), &cam).unwrap();
    let r = locate_reentry(&mask, &render_depth(&cam).unwrap(), &detect_eor(&mask), &cam, Turn::Left).unwrap();
    assert!(r.valid);
    assert!((r.d_r - 0.4).abs() <= 0.03, "d_r {}", r.d_r);
}

#[test]
fn zero_depth_is_invalid_not_error() {
    let cam = CameraModel::default();
    let mask = render_mask(&field(), &camera_at(1.5, 0.0, 0.0), &cam).unwrap();
    let depth = DepthImage::new(cam.width, cam.height);
    let r = locate_reentry(&mask, &depth, &detect_eor(&mask), &cam, Turn::Left).unwrap();
    assert!(!r.valid);
    assert!(r.reason.unwrap().contains("depth"));
}

#[test]
fn no_rows_on_turn_side_is_unavailable() {
    let cam = CameraModel::default();
    let robot = RobotSpec::default();
    let body = Pose2D::new(10.0 - 1.5 - robot.length / 2.0, 0.0, 0.0);
    let mask = render_mask(&field(), &robot.camera_pose(&body), &cam).unwrap();
    let eor = detect_eor(&mask);
    let r = locate_reentry(&mask, &render_depth(&cam).unwrap(), &eor, &cam, Turn::Right).unwrap();
    assert!(!r.valid);
    let empty = SegMask::new(cam.width, cam.height);
    let roi = build_roi(&mask, &eor, Turn::Right).unwrap();
    assert!(matches!(scan_pt(&empty, roi.a, &roi), Err(Error::DetectionUnavailable(_))));
}

#[test]
fn invalid_eor_is_unavailable() {
    let cam = CameraModel::default();
    let mask = render_mask(&field(), &camera_at(1.5, 0.0, 0.0), &cam).unwrap();
    let r = locate_reentry(&mask, &render_depth(&cam).unwrap(), &EorDetection::invalid(), &cam, Turn::Left).unwrap();
    assert!(!r.valid);
}

#[test]
fn mismatched_depth_is_error() {
    let cam = CameraModel::default();
    let mask = SegMask::new(cam.width, cam.height);
    let depth = DepthImage::new(10, 10);
    let r = locate_reentry(&mask, &depth, &EorDetection::invalid(), &cam, Turn::Left);
    assert!(matches!(r, Err(Error::DimensionMismatch(_))));
}

#[test]
fn first_maximum_in_path_order_wins() {
    let mut mask = SegMask::new(40, 30);
    let a: Px = (20, 0);
    let path: Vec<Px> = (0..30).map(|v| (0, v)).chain((1..=20).map(|u| (u, 29))).collect();
    let roi = ScanRoi {
        side: Turn::Left,
        a,
        b: (20, 29),
        l1: (0, 0),
        l2: (0, 29),
        l3: (10, 29),
        corner_path: path,
        top_segment: (0..=20).rev().map(|u| (u, 0)).collect(),
    };
    // One pixel on the segment to (0, 20), one on the segment to (10, 29).
    let late = line_pixels(a, (10, 29))[5];
    let early = line_pixels(a, (0, 20))[7];
    assert!(!line_pixels(a, (0, 20)).contains(&late));
    mask.set(late.0 as u32, late.1 as u32, true);
    mask.set(early.0 as u32, early.1 as u32, true);
    let hit = scan_pt(&mask, a, &roi).unwrap();
    assert_eq!(hit.sum, 1);
    assert_eq!(hit.point, roi.corner_path.iter().copied().find(|&p| line_sum(&mask, a, p) == 1).unwrap());
    assert!(hit.point.0 == 0, "expected a side-edge point, got {:?}", hit.point);
}

proptest! {
    #[test]
    fn line_sum_is_symmetric(seed in 0u64..1000, a in (-10i64..70, -10i64..50), b in (-10i64..70, -10i64..50)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut mask = SegMask::new(60, 40);
        for _ in 0..400 {
            mask.set(rng.random_range(0..60), rng.random_range(0..40), true);
        }
        prop_assert_eq!(line_sum(&mask, a, b), line_sum(&mask, b, a));
        let mirror = mask.mirrored();
        let m = |p: Px| (59 - p.0, p.1);
        prop_assert_eq!(line_sum(&mask, a, b), line_sum(&mirror, m(a), m(b)));
    }
}
