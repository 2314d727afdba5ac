use std::f64::consts::PI;

use proptest::prelude::*;

use geodepth::analysis::{spread_from_samples, SpreadConfig};
use geodepth::camera::{backproject_pixel, project_point, CalibratedCamera, Point3};
use geodepth::depth::{depth_full_with, height_forward_with, GeometryObservation, HeightModel};
use geodepth::depth_metrics::depth_errors;
use geodepth::eval::ap::{evaluate_ap, Difficulty, EvalConfig, RecallGrid, Task};
use geodepth::eval::iou::{iou_3d, iou_bev};
use geodepth::geometry::{
    alpha_from_ry, corner_offsets, corners_camera, delta_z_max, normalize_angle, project_box, ry_from_alpha, Box3D,
};
use geodepth::kitti::{parse_label_line, serialize_label, LabelRecord};
use geodepth::losses::{focal_variant, optimal_sigma, uncertainty_l1, FocalConfig, UncertainDepthPrediction};

fn camera() -> impl Strategy<Value = CalibratedCamera> {
    (500.0..900.0f64, 500.0..900.0f64, 500.0..700.0f64, 150.0..200.0f64, -50.0..50.0f64, -0.5..0.5f64, -0.01..0.01f64)
        .prop_map(|(fu, fv, cu, cv, tx, ty, tz)| CalibratedCamera::with_translation(fu, fv, cu, cv, [tx, ty, tz]).unwrap())
}

fn boxes() -> impl Strategy<Value = Box3D> {
    (0.5..3.0f64, 0.5..3.0f64, 0.5..6.0f64, -20.0..20.0f64, -2.0..3.0f64, 8.0..80.0f64, -PI..PI)
        .prop_map(|(w, h, l, x, y, z, ry)| Box3D::new(w, h, l, Point3::new(x, y, z), ry).unwrap())
}

proptest! {
    #[test]
    fn project_then_backproject_is_identity(cam in camera(), x in -40.0..40.0f64, y in -5.0..5.0f64, z in 0.5..120.0f64) {
        let p = Point3::new(x, y, z);
        let px = project_point(p, &cam).unwrap();
        let q = backproject_pixel(px.u, px.v, px.z, &cam).unwrap();
        let scale = (x * x + y * y + z * z).sqrt();
        prop_assert!((q.x - x).abs() <= 1e-12 * scale && (q.y - y).abs() <= 1e-12 * scale);
        prop_assert_eq!(q.z, z);
    }

    #[test]
    fn observation_angle_is_a_bijection(ry in -10.0..10.0f64, x in -40.0..40.0f64, z in 0.5..80.0f64) {
        let alpha = alpha_from_ry(ry, x, z).unwrap();
        prop_assert!((-PI..PI).contains(&alpha));
        let back = ry_from_alpha(alpha, x, z).unwrap();
        let d = normalize_angle(back - ry).abs();
        prop_assert!(d < 1e-12 || (2.0 * PI - d) < 1e-12, "{} vs {}", back, ry);
    }

    #[test]
    fn delta_z_max_is_the_largest_corner_offset(w in 0.1..4.0f64, l in 0.1..8.0f64, ry in -7.0..7.0f64) {
        let brute = corner_offsets(w, 1.0, l, ry).unwrap().iter().map(|o| o.z.abs()).fold(0.0, f64::max);
        prop_assert!((delta_z_max(w, l, ry) - brute).abs() < 1e-12);
    }

    #[test]
    fn corners_surround_the_bottom_center(b in boxes()) {
        let set = corners_camera(&b);
        let c = set.centroid();
        prop_assert!((c.x - b.bottom_center.x).abs() < 1e-9);
        prop_assert!((c.y - (b.bottom_center.y - b.height / 2.0)).abs() < 1e-9);
        prop_assert!((c.z - b.bottom_center.z).abs() < 1e-9);
    }

    #[test]
    fn projected_box_contains_every_corner(b in boxes(), cam in camera()) {
        prop_assume!(corners_camera(&b).corners.iter().all(|c| c.z > 1.0));
        let bb = project_box(&b, &cam).unwrap();
        let [l, t, r, btm] = bb.ltrb();
        for p in corners_camera(&b).corners {
            let px = project_point(p, &cam).unwrap();
            prop_assert!(px.u >= l - 1e-9 && px.u <= r + 1e-9 && px.v >= t - 1e-9 && px.v <= btm + 1e-9);
        }
        prop_assert!(bb.h > 0.0);
    }

    #[test]
    fn paired_inverse_recovers_depth(
        z in 5.0..80.0f64, beta in -0.1..0.15f64, height in 1.2..2.2f64, dz in 0.0..3.0f64, f_v in 600.0..800.0f64,
    ) {
        prop_assume!(z > dz + 0.5);
        let h = height_forward_with(HeightModel::Paired, z, beta, height, dz, f_v).unwrap();
        let obs = GeometryObservation::new(h, beta, height, dz, f_v).unwrap();
        let back = depth_full_with(&obs, HeightModel::Paired).unwrap();
        prop_assert!((back - z).abs() / z < 1e-9);
    }

    #[test]
    fn bottom_anchored_inverse_recovers_boxes_below_the_camera(
        z in 5.0..80.0f64, beta in 0.03..0.15f64, height in 1.2..2.2f64, dz in 0.0..3.0f64, f_v in 600.0..800.0f64,
    ) {
        prop_assume!(z > dz + 0.5 && z * beta.tan() > height);
        let h = height_forward_with(HeightModel::BottomAnchored, z, beta, height, dz, f_v).unwrap();
        let obs = GeometryObservation::new(h, beta, height, dz, f_v).unwrap();
        let back = depth_full_with(&obs, HeightModel::BottomAnchored).unwrap();
        prop_assert!((back - z).abs() / z < 1e-9);
    }

    #[test]
    fn label_round_trip(
        cat in prop::sample::select(vec!["Car", "Van", "Pedestrian", "Cyclist", "DontCare", "Misc"]),
        trunc in 0.0..1.0f64, occ in -1..=3i32, alpha in -PI..PI,
        left in 0.0..1200.0f64, top in 0.0..370.0f64, bw in 0.0..300.0f64, bh in 0.0..200.0f64,
        dims in prop::array::uniform3(0.1..10.0f64), loc in prop::array::uniform3(-50.0..50.0f64),
        ry in -PI..PI, score in prop::option::of(-10.0..10.0f64),
    ) {
        let rec = LabelRecord {
            category: cat.to_string(), truncation: trunc, occlusion: occ, alpha,
            bbox: [left, top, left + bw, top + bh], dims, location: loc, rotation_y: ry, score,
        };
        let once = parse_label_line(&serialize_label(&rec), 1).unwrap();
        let text = serialize_label(&once);
        let twice = parse_label_line(&text, 1).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(serialize_label(&twice), text);
    }

    #[test]
    fn iou_is_symmetric_and_bounded(a in boxes(), b in boxes()) {
        let (ab, ba) = (iou_bev(&a, &b), iou_bev(&b, &a));
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((iou_bev(&a, &a) - 1.0).abs() < 1e-9);
        prop_assert!(iou_3d(&a, &b) <= ab + 1e-12);
    }

    #[test]
    fn iou_is_invariant_under_a_half_turn(a in boxes(), b in boxes()) {
        let turned = Box3D::new(a.width, a.height, a.length, a.bottom_center, a.yaw + PI).unwrap();
        prop_assert!((iou_bev(&a, &b) - iou_bev(&turned, &b)).abs() < 1e-9);
    }

    #[test]
    fn ap_ignores_monotone_score_rescaling(
        gts in prop::collection::vec((0.0..800.0f64, 100.0..200.0f64, 40.0..200.0f64, 40.0..150.0f64), 0..5),
        dets in prop::collection::vec((0usize..8, -15.0..15.0f64, 0.0..1.0f64), 0..8),
    ) {
        let car = |bbox: [f64; 4], score: Option<f64>| LabelRecord {
            category: "Car".into(), truncation: 0.0, occlusion: 0, alpha: 0.0, bbox,
            dims: [1.5, 1.6, 3.9], location: [0.0, 1.7, 20.0], rotation_y: 0.0, score,
        };
        let gts: Vec<LabelRecord> = gts.iter().map(|&(u, v, w, h)| car([u, v, u + w, v + h], None)).collect();
        let make = |f: &dyn Fn(f64) -> f64| -> Vec<LabelRecord> {
            dets.iter().enumerate().map(|(i, &(k, j, s))| {
                let bbox = gts.get(k).map(|g| g.bbox.map(|c| c + j)).unwrap_or([10.0 * i as f64, 100.0, 10.0 * i as f64 + 80.0, 160.0]);
                car(bbox, Some(f(s)))
            }).collect()
        };
        let plain = make(&|s| s);
        let rescaled = make(&|s| 0.5 * s * s * s + 0.1);
        for grid in [RecallGrid::R11, RecallGrid::R40] {
            let cfg = EvalConfig::new(0.7, grid, Difficulty::Moderate, Task::Detection2d, "Car").unwrap();
            let a = evaluate_ap(&plain, &gts, &cfg).unwrap();
            let b = evaluate_ap(&rescaled, &gts, &cfg).unwrap();
            prop_assert_eq!(a.ap, b.ap);
            prop_assert!((0.0..=100.0).contains(&a.ap));
        }
    }

    #[test]
    fn silog_is_scale_invariant(pairs in prop::collection::vec((1.0..80.0f64, 0.5..1.5f64), 1..50), k in 0.1..10.0f64) {
        let gt: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let pred: Vec<f64> = pairs.iter().map(|p| p.0 * p.1).collect();
        let scaled: Vec<f64> = pred.iter().map(|p| p * k).collect();
        let (a, b) = (depth_errors(&pred, &gt).unwrap(), depth_errors(&scaled, &gt).unwrap());
        prop_assert!((a.silog - b.silog).abs() < 1e-6);
        prop_assert!(a.silog >= 0.0 && a.abs_rel >= 0.0 && a.sq_rel >= 0.0 && a.irmse >= 0.0);
    }

    #[test]
    fn losses_are_well_behaved(p in 0.001..0.999f64, y in 0.0..1.0f64, residual in -20.0..20.0f64, sigma in 0.05..10.0f64) {
        let cfg = FocalConfig::default();
        prop_assert!(focal_variant(p, y, &cfg).unwrap().value >= 0.0);
        prop_assert!(focal_variant(p, 1.0, &cfg).unwrap().value >= 0.0);
        prop_assume!(residual.abs() > 1e-3);
        let best = optimal_sigma(residual);
        let at = |s: f64| uncertainty_l1(&UncertainDepthPrediction { depth: 0.0, sigma: s }, residual).unwrap().value;
        prop_assert!(at(best) <= at(sigma) + 1e-12);
    }

    #[test]
    fn spread_matches_a_group_by(samples in prop::collection::vec((28.0..37.0f64, 1.47..1.54f64, 5.0..80.0f64), 0..200)) {
        let cfg = SpreadConfig::default();
        let table = spread_from_samples(&samples, &cfg);
        for (i, &hc) in cfg.h_centers.iter().enumerate() {
            let mut means = Vec::new();
            for (j, &hh) in cfg.height_centers.iter().enumerate() {
                // well clear of the bucket edges so the check is independent of edge handling
                let inside = |v: f64, c: f64, t: f64| (v - c).abs() < t - 1e-6;
                let outside = |v: f64, c: f64, t: f64| (v - c).abs() > t + 1e-6;
                let zs: Vec<f64> = samples.iter()
                    .filter(|s| inside(s.0, hc, cfg.h_tolerance) && inside(s.1, hh, cfg.height_tolerance))
                    .map(|s| s.2).collect();
                let ambiguous = samples.iter().any(|s| {
                    !(inside(s.0, hc, cfg.h_tolerance) || outside(s.0, hc, cfg.h_tolerance))
                        || !(inside(s.1, hh, cfg.height_tolerance) || outside(s.1, hh, cfg.height_tolerance))
                });
                if ambiguous {
                    return Ok(());
                }
                let cell = table.cells[i][j];
                match cell {
                    None => prop_assert!(zs.is_empty()),
                    Some(c) => {
                        let max = zs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                        let min = zs.iter().copied().fold(f64::INFINITY, f64::min);
                        prop_assert_eq!(c.count, zs.len());
                        prop_assert_eq!((c.max, c.min), (max, min));
                        prop_assert!(c.diff >= 0.0);
                        means.push(zs.iter().sum::<f64>() / zs.len() as f64);
                    }
                }
            }
            match table.average[i] {
                None => prop_assert!(means.is_empty()),
                Some(avg) => {
                    prop_assert_eq!(avg.count, means.len());
                    let max = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    prop_assert!((avg.max - max).abs() < 1e-9);
                }
            }
        }
    }
}
