use geodepth::analysis::{
    depth_spread_table, fully_visible, generate_scenes, label_for_box, linspace, misalignment_report, sensitivity_sweep, spread_from_samples,
    MisalignmentConfig, SpreadConfig, SweepConfig, SyntheticSceneSpec, DEFAULT_DEPTH_BUCKETS,
};
use geodepth::camera::{CalibratedCamera, Point3};
use geodepth::depth::{compare_formulas, HeightModel};
use geodepth::geometry::{project_box, Box3D};
use geodepth::kitti::{Frame, FrameCalib, parse_calib_file, parse_label_file, serialize_calib, serialize_label_file};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn synthetic(frames: usize, seed: u64) -> Vec<geodepth::kitti::Frame> {
    generate_scenes(&SyntheticSceneSpec { seed, ..Default::default() }, frames).unwrap()
}

#[test]
fn full_formula_is_exact_on_boxes_below_the_camera() {
    let frames = synthetic(50, 11);
    let cam = frames[0].calib.camera;
    let boxes: Vec<Box3D> = frames
        .iter()
        .flat_map(|f| f.labels.iter().map(|l| l.box3d().unwrap()))
        .filter(|b| b.bottom_center.y > b.height)
        .collect();
    assert!(boxes.len() > 100);
    let rows = compare_formulas(&boxes, &cam, HeightModel::BottomAnchored);
    let mut sums = [0.0; 3];
    for r in &rows {
        let e = r.rel_errors().expect("every generated box is recoverable");
        assert!(e[0] < 1e-9, "{r:?}");
        for (s, v) in sums.iter_mut().zip(e) {
            *s += v;
        }
    }
    // the pose-free approximations are biased on the same boxes
    assert!(sums[1] > 1e3 * sums[0] && sums[2] > 1e3 * sums[0]);
}

#[test]
fn comparison_rows_follow_input_order() {
    let frames = synthetic(5, 2);
    let boxes: Vec<Box3D> = frames.iter().flat_map(|f| f.labels.iter().map(|l| l.box3d().unwrap())).collect();
    let rows = compare_formulas(&boxes, &CalibratedCamera::kitti_p2(), HeightModel::Paired);
    assert!(rows.iter().enumerate().all(|(i, r)| r.index == i && r.z_true == boxes[i].bottom_center.z));
}

#[test]
fn misalignment_grows_with_annotation_noise() {
    let clean = synthetic(40, 5);
    let cfg = MisalignmentConfig::default();
    let base = misalignment_report(&clean, &DEFAULT_DEPTH_BUCKETS, &cfg);
    for row in &base {
        assert!(row.mean_iou > 0.999, "{row:?}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut noisy = clean.clone();
    for f in &mut noisy {
        for l in &mut f.labels {
            let [a, b, c, d] = l.bbox;
            let shift = rng.random_range(4.0..6.0);
            l.bbox = [a + shift, b, c + shift, d];
        }
    }
    let shifted = misalignment_report(&noisy, &DEFAULT_DEPTH_BUCKETS, &cfg);
    assert_eq!(shifted.len(), base.len());
    for (s, b) in shifted.iter().zip(&base) {
        assert_eq!(s.count + s.truncated, b.count + b.truncated);
        assert!(s.mean_iou < b.mean_iou);
        assert!(s.mean_du > 3.9 && s.mean_du < 6.1, "{s:?}");
    }
}

#[test]
fn sweep_depths_reproduce_the_fixed_height_through_projection() {
    let cam = CalibratedCamera::new(721.5377, 721.5377, 609.5593, 172.854).unwrap();
    let cfg = SweepConfig {
        betas: linspace(0.06, 0.10, 9),
        model: HeightModel::BottomAnchored,
        ..SweepConfig::car()
    };
    let result = sensitivity_sweep(&cfg).unwrap();
    for c in &result.cells {
        let z = *c.depth.as_ref().unwrap();
        let b = Box3D::new(c.width, cfg.height, c.length, Point3::new(0.0, z * c.beta.tan(), z), c.yaw).unwrap();
        let h = project_box(&b, &cam).unwrap().h;
        assert!((h - cfg.h).abs() < 1e-9, "{c:?}: h = {h}");
    }
}

#[test]
fn sweep_spread_equals_the_table_diff_of_its_depths() {
    let cfg = SweepConfig::car();
    let result = sensitivity_sweep(&cfg).unwrap();
    let samples: Vec<(f64, f64, f64)> = result
        .cells
        .iter()
        .filter_map(|c| c.depth.as_ref().ok().map(|&z| (cfg.h, cfg.height, z)))
        .collect();
    let table = spread_from_samples(&samples, &SpreadConfig::default());
    let cell = table.cell(30.0, 1.51).unwrap();
    assert_eq!(cell.count, samples.len());
    assert_eq!(Some(cell.diff), result.spread);
    assert!(cell.diff > 5.0);
}

#[test]
fn sweep_spread_lower_bounds_the_table_diff_on_boxes_built_from_the_grid() {
    let cam = CalibratedCamera::new(721.5377, 721.5377, 609.5593, 172.854).unwrap();
    let cfg = SweepConfig {
        betas: linspace(0.06, 0.10, 9),
        model: HeightModel::BottomAnchored,
        ..SweepConfig::car()
    };
    let result = sensitivity_sweep(&cfg).unwrap();
    let labels = result
        .cells
        .iter()
        .map(|c| {
            let z = *c.depth.as_ref().unwrap();
            let b = Box3D::new(c.width, cfg.height, c.length, Point3::new(0.0, z * c.beta.tan(), z), c.yaw).unwrap();
            label_for_box("Car", &b, &cam).unwrap()
        })
        .collect();
    let frames = [Frame { id: "sweep".into(), labels, calib: FrameCalib::from_camera(cam) }];
    let cell = depth_spread_table(&frames, &SpreadConfig::default()).cell(30.0, 1.51).unwrap();
    let spread = result.spread.unwrap();
    assert_eq!(cell.count, result.cells.len());
    assert!(cell.diff >= spread - 1e-9);
    assert!((cell.diff - spread).abs() < 1e-9);
}

#[test]
fn enlarged_near_annotations_lower_only_the_near_bucket() {
    let mut frames = synthetic(60, 8);
    for l in frames.iter_mut().flat_map(|f| f.labels.iter_mut()) {
        if l.location[2] < 10.0 {
            let [a, b, c, d] = l.bbox;
            let (dw, dh) = (0.05 * (c - a), 0.05 * (d - b));
            l.bbox = [a - dw, b - dh, c + dw, d + dh];
        }
    }
    let rows = misalignment_report(&frames, &DEFAULT_DEPTH_BUCKETS, &MisalignmentConfig { image_size: (1e5, 1e5) });
    let near = rows.iter().find(|r| r.range.1 == 10.0).expect("generator places boxes under 10 m");
    for far in rows.iter().filter(|r| r.range.0 >= 10.0) {
        assert!(near.mean_iou < far.mean_iou, "{near:?} vs {far:?}");
    }
    assert!((near.mean_iou - 1.0 / 1.21).abs() < 1e-3);
}

#[test]
fn widening_the_grid_never_shrinks_the_spread() {
    let narrow = SweepConfig {
        betas: linspace(0.0, 0.05, 11),
        yaws: linspace(-1.0, 1.0, 21),
        ..SweepConfig::car()
    };
    let mut wide = narrow.clone();
    wide.betas.extend(linspace(-0.05, 0.10, 7));
    wide.yaws.extend(linspace(-3.0, 3.0, 13));
    wide.footprints.push((2.0, 5.0));
    for model in [HeightModel::Paired, HeightModel::BottomAnchored] {
        let a = sensitivity_sweep(&SweepConfig { model, ..narrow.clone() }).unwrap();
        let b = sensitivity_sweep(&SweepConfig { model, ..wide.clone() }).unwrap();
        assert!(b.spread.unwrap() >= a.spread.unwrap());
    }
}

#[test]
fn generated_frames_survive_the_file_formats() {
    let spec = SyntheticSceneSpec { seed: 9, boxes_per_frame: 6, ..Default::default() };
    let frames = generate_scenes(&spec, 30).unwrap();
    assert_eq!(frames.len(), 30);
    for f in &frames {
        assert_eq!(f.labels.len(), 6);
        let labels = parse_label_file(&serialize_label_file(&f.labels)).unwrap();
        for (read, made) in labels.iter().zip(&f.labels) {
            // 3D fields are generated on the file's 2-decimal grid; 2D fields are rounded on write
            assert_eq!((read.dims, read.location, read.rotation_y), (made.dims, made.location, made.rotation_y));
            assert!(read.bbox.iter().zip(made.bbox).all(|(a, b)| (a - b).abs() <= 0.005 + 1e-9));
            assert!((read.alpha - made.alpha).abs() <= 0.005 + 1e-9);
        }
        let calib = parse_calib_file(&serialize_calib(&f.calib)).unwrap();
        assert_eq!(calib.camera, f.calib.camera);
        for l in &f.labels {
            assert!(fully_visible(&l.box3d().unwrap(), &f.calib.camera, spec.image_size));
        }
    }
}

#[test]
fn generation_is_reproducible_and_prefix_stable() {
    let a = synthetic(12, 4);
    let b = synthetic(12, 4);
    assert_eq!(a, b);
    let prefix = synthetic(5, 4);
    assert_eq!(&a[..5], &prefix[..]);
    assert_ne!(synthetic(3, 5), a[..3]);
}

#[test]
fn infeasible_spec_is_a_config_error() {
    let spec = SyntheticSceneSpec {
        z_range: (1.0, 1.2),
        ..Default::default()
    };
    assert!(matches!(generate_scenes(&spec, 1), Err(geodepth::Error::Config(_))));
}
