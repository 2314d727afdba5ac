//! Golden fixtures: JSON files pairing an operation input with its expected
//! output, re-evaluated against the live implementation.
//!
//! Each `*.json` file in the fixture directory holds an array of
//! [`GoldenFixture`]s. Expected numbers are compared with the fixture
//! tolerance (absolute plus relative); expected objects only need to be a
//! subset of the produced object. An expected value of `{"error": kind}`
//! asserts that the operation fails with that error kind.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::analysis::{
    depth_spread_table, generate_scenes, misalignment_report, misalignment_table, sensitivity_sweep, HeightSource,
    MisalignmentConfig, SpreadConfig, SweepConfig, SyntheticSceneSpec, DEFAULT_DEPTH_BUCKETS,
};
use crate::camera::{
    backproject_depth_map, backproject_pixel, beta_from_pixel, project_point, CalibratedCamera, DepthMap, Grid, Point3,
};
use crate::depth::{
    compare_formulas, comparison_table, depth_full_with, depth_v1, depth_v2, height_forward_with, DepthV2Scale,
    GeometryObservation, HeightModel,
};
use crate::depth_metrics::{bucketed_depth_errors, depth_errors, DepthSample};
use crate::error::{Error, Result};
use crate::eval::{assign_difficulty, evaluate_ap, iou_3d, iou_bev, iou_ltrb, EvalConfig, RecallGrid, Task};
use crate::geometry::{
    alpha_from_ry, corner_offsets, corners_camera, delta_z_max, project_box, ry_from_alpha, Box3D,
};
use crate::kitti::{
    load_frame_set, parse_calib_file_with, parse_label_line, serialize_label, Frame, FrameCalib, LabelRecord,
    DEFAULT_REFERENCE,
};
use crate::losses::{focal_variant, total_loss, uncertainty_l1, FocalConfig, LossWeights, UncertainDepthPrediction};
use crate::report::Precision;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProvenanceTag {
    /// A value printed in the published results.
    Paper,
    /// Follows from definitions alone.
    Trivial,
    /// Computed by an independent oracle.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tag: ProvenanceTag,
    /// How the expected value was obtained (oracle, table cell, identity).
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenFixture {
    pub name: String,
    pub operation: String,
    pub input: Value,
    pub expected: Value,
    pub provenance: Provenance,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureOutcome {
    pub name: String,
    pub operation: String,
    pub passed: bool,
    /// Empty on success, otherwise the first mismatch.
    pub detail: String,
}

/// Every operation name a fixture may use.
pub const OPERATIONS: &[&str] = &[
    "project_point",
    "backproject_pixel",
    "backproject_depth_map",
    "beta_from_pixel",
    "corner_offsets",
    "corners_camera",
    "delta_z_max",
    "project_box",
    "alpha_from_ry",
    "ry_from_alpha",
    "height_forward",
    "depth_full",
    "depth_v1",
    "depth_v2",
    "compare_formulas",
    "parse_label_line",
    "serialize_label",
    "parse_calib_file",
    "load_frame_set",
    "iou_2d",
    "iou_bev",
    "iou_3d",
    "assign_difficulty",
    "evaluate_ap",
    "depth_errors",
    "bucketed_depth_errors",
    "focal_variant",
    "uncertainty_l1",
    "total_loss",
    "generate_scenes",
    "misalignment_report",
    "depth_spread_table",
    "sensitivity_sweep",
    "run",
    "verify_fixtures",
];

fn bad(detail: impl Into<String>) -> Error {
    Error::Input(format!("fixture input: {}", detail.into()))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing `{key}`")))
}

fn f(v: &Value, key: &str) -> Result<f64> {
    field(v, key)?.as_f64().ok_or_else(|| bad(format!("`{key}` is not a number")))
}

fn f_or(v: &Value, key: &str, default: f64) -> Result<f64> {
    if v.get(key).is_some() {
        f(v, key)
    } else {
        Ok(default)
    }
}

fn s<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?.as_str().ok_or_else(|| bad(format!("`{key}` is not a string")))
}

fn floats(v: &Value) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| bad("expected an array of numbers"))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| bad("expected a number")))
        .collect()
}

fn camera(v: &Value) -> Result<CalibratedCamera> {
    let c = field(v, "camera")?;
    if let Some(p) = c.get("P") {
        let m: [f64; 12] = floats(p)?.try_into().map_err(|_| bad("`P` needs 12 values"))?;
        return CalibratedCamera::from_projection(&m);
    }
    let t = match c.get("t") {
        Some(t) => floats(t)?.try_into().map_err(|_| bad("`t` needs 3 values"))?,
        None => [0.0; 3],
    };
    CalibratedCamera::with_translation(f(c, "f_u")?, f(c, "f_v")?, f(c, "c_u")?, f(c, "c_v")?, t)
}

fn box3d(v: &Value) -> Result<Box3D> {
    Box3D::new(
        f(v, "w")?,
        f(v, "h")?,
        f(v, "l")?,
        Point3::new(f(v, "x")?, f(v, "y")?, f(v, "z")?),
        f(v, "ry")?,
    )
}

fn model(v: &Value) -> Result<HeightModel> {
    match v.get("model").and_then(Value::as_str) {
        None | Some("paired") => Ok(HeightModel::Paired),
        Some("bottom-anchored") => Ok(HeightModel::BottomAnchored),
        Some(m) => Err(bad(format!("unknown model `{m}`"))),
    }
}

fn observation(v: &Value) -> Result<GeometryObservation> {
    GeometryObservation::new(f(v, "h")?, f(v, "beta")?, f(v, "H")?, f(v, "dz")?, f(v, "f_v")?)
}

fn point(p: Point3) -> Value {
    json!([p.x, p.y, p.z])
}

fn labels(v: &Value) -> Result<Vec<LabelRecord>> {
    v.as_array()
        .ok_or_else(|| bad("expected an array of label lines"))?
        .iter()
        .enumerate()
        .map(|(i, l)| parse_label_line(l.as_str().ok_or_else(|| bad("label line is not a string"))?, i + 1))
        .collect()
}

fn frames(v: &Value) -> Result<Vec<Frame>> {
    field(v, "frames")?
        .as_array()
        .ok_or_else(|| bad("`frames` is not an array"))?
        .iter()
        .enumerate()
        .map(|(i, fr)| {
            Ok(Frame {
                id: format!("{i:06}"),
                labels: labels(field(fr, "labels")?)?,
                calib: FrameCalib::from_camera(camera(fr)?),
            })
        })
        .collect()
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain { .. } => "domain",
        Error::Parse { .. } => "parse",
        Error::Calib { .. } => "calib",
        Error::Input(_) => "input",
        Error::Config(_) => "config",
        Error::Invariant(_) => "invariant",
        Error::Io { .. } => "io",
        Error::Json(_) => "json",
    }
}

fn write_tree(root: &Path, files: &Value) -> Result<()> {
    let Some(map) = files.as_object() else { return Ok(()) };
    for (rel, content) in map {
        let p = root.join(rel);
        if let Some(parent) = p.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let text = content.as_str().ok_or_else(|| bad("file content is not a string"))?;
        std::fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}

fn read_tree(root: &Path, dir: &Path, out: &mut BTreeMap<String, Value>) -> Result<()> {
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let p = entry.map_err(|e| Error::io(dir, e))?.path();
        if p.is_dir() {
            read_tree(root, &p, out)?;
        } else if let Ok(text) = std::fs::read_to_string(&p) {
            let rel = p.strip_prefix(root).expect("under root").to_string_lossy().replace('\\', "/");
            out.insert(rel, Value::String(text));
        }
    }
    Ok(())
}

fn tempdir() -> Result<tempfile::TempDir> {
    tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))
}

/// Runs one operation on a JSON input.
pub fn run_operation(op: &str, v: &Value) -> Result<Value> {
    let raw = Precision::Raw;
    Ok(match op {
        "project_point" => {
            let p = floats(field(v, "point")?)?;
            let px = project_point(Point3::new(p[0], p[1], p[2]), &camera(v)?)?;
            json!({"u": px.u, "v": px.v, "z": px.z})
        }
        "backproject_pixel" => point(backproject_pixel(f(v, "u")?, f(v, "v")?, f(v, "z")?, &camera(v)?)?),
        "backproject_depth_map" => {
            let cells = field(v, "depth")?
                .as_array()
                .ok_or_else(|| bad("`depth` is not an array"))?
                .iter()
                .map(Value::as_f64)
                .collect();
            let rows = f(v, "rows")? as usize;
            let cols = f(v, "cols")? as usize;
            let map: DepthMap = Grid::from_vec(rows, cols, cells)?;
            let pts = backproject_depth_map(&map, &camera(v)?)?;
            Value::Array(pts.cells().iter().map(|c| c.map_or(Value::Null, point)).collect())
        }
        "beta_from_pixel" => json!(beta_from_pixel(f(v, "v")?, &camera(v)?)),
        "corner_offsets" => {
            let c = corner_offsets(f(v, "w")?, f(v, "h")?, f(v, "l")?, f(v, "ry")?)?;
            Value::Array(c.into_iter().map(point).collect())
        }
        "corners_camera" => Value::Array(corners_camera(&box3d(field(v, "box")?)?).corners.into_iter().map(point).collect()),
        "delta_z_max" => json!(delta_z_max(f(v, "w")?, f(v, "l")?, f(v, "ry")?)),
        "project_box" => json!(project_box(&box3d(field(v, "box")?)?, &camera(v)?)?.ltrb()),
        "alpha_from_ry" => json!(alpha_from_ry(f(v, "ry")?, f(v, "x")?, f(v, "z")?)?),
        "ry_from_alpha" => json!(ry_from_alpha(f(v, "alpha")?, f(v, "x")?, f(v, "z")?)?),
        "height_forward" => json!(height_forward_with(
            model(v)?,
            f(v, "z")?,
            f(v, "beta")?,
            f(v, "H")?,
            f(v, "dz")?,
            f(v, "f_v")?
        )?),
        "depth_full" => json!(depth_full_with(&observation(v)?, model(v)?)?),
        "depth_v1" => json!(depth_v1(&observation(v)?)?),
        "depth_v2" => json!(depth_v2(f(v, "h")?, f(v, "H")?, DepthV2Scale::new(f(v, "k")?)?)?),
        "compare_formulas" => {
            let boxes = field(v, "boxes")?
                .as_array()
                .ok_or_else(|| bad("`boxes` is not an array"))?
                .iter()
                .map(box3d)
                .collect::<Result<Vec<_>>>()?;
            comparison_table(&compare_formulas(&boxes, &camera(v)?, model(v)?)).to_json(raw)
        }
        "parse_label_line" => serde_json::to_value(parse_label_line(s(v, "line")?, 1)?)?,
        "serialize_label" => {
            let rec: LabelRecord = serde_json::from_value(field(v, "record")?.clone())?;
            Value::String(serialize_label(&rec))
        }
        "parse_calib_file" => {
            let reference = v.get("reference").and_then(Value::as_str).unwrap_or(DEFAULT_REFERENCE);
            let c = parse_calib_file_with(s(v, "text")?, reference)?;
            let keys: Vec<&str> = c.matrices.iter().map(|(k, _)| k.as_str()).collect();
            let cam = c.camera;
            json!({
                "keys": keys,
                "camera": {"f_u": cam.f_u, "f_v": cam.f_v, "c_u": cam.c_u, "c_v": cam.c_v, "t": cam.t_proj},
            })
        }
        "load_frame_set" => {
            let dir = tempdir()?;
            let (ld, cd) = (dir.path().join("label_2"), dir.path().join("calib"));
            std::fs::create_dir_all(&ld).map_err(|e| Error::io(&ld, e))?;
            std::fs::create_dir_all(&cd).map_err(|e| Error::io(&cd, e))?;
            let prefixed = |key: &str, sub: &str| -> Value {
                let m: Map<String, Value> = v
                    .get(key)
                    .and_then(Value::as_object)
                    .map(|m| m.iter().map(|(k, c)| (format!("{sub}/{k}.txt"), c.clone())).collect())
                    .unwrap_or_default();
                Value::Object(m)
            };
            write_tree(dir.path(), &prefixed("labels", "label_2"))?;
            write_tree(dir.path(), &prefixed("calib", "calib"))?;
            let ids: Vec<String> = field(v, "ids")?
                .as_array()
                .ok_or_else(|| bad("`ids` is not an array"))?
                .iter()
                .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("id is not a string")))
                .collect::<Result<_>>()?;
            let set = load_frame_set(&ld, &cd, &ids)?;
            Value::Array(
                set.into_iter()
                    .map(|(id, fr)| match fr {
                        Ok(fr) => json!({"id": id, "ok": true, "objects": fr.labels.len(), "f_v": fr.calib.camera.f_v}),
                        Err(e) => json!({"id": id, "ok": false, "error": error_kind(&e)}),
                    })
                    .collect(),
            )
        }
        "iou_2d" => {
            let a: [f64; 4] = floats(field(v, "a")?)?.try_into().map_err(|_| bad("`a` needs 4 values"))?;
            let b: [f64; 4] = floats(field(v, "b")?)?.try_into().map_err(|_| bad("`b` needs 4 values"))?;
            json!(iou_ltrb(a, b))
        }
        "iou_bev" => json!(iou_bev(&box3d(field(v, "a")?)?, &box3d(field(v, "b")?)?)),
        "iou_3d" => json!(iou_3d(&box3d(field(v, "a")?)?, &box3d(field(v, "b")?)?)),
        "assign_difficulty" => {
            let rec = parse_label_line(s(v, "line")?, 1)?;
            json!(assign_difficulty(&rec).map_or("ignored", |d| d.name()))
        }
        "evaluate_ap" => {
            let task = match s(v, "task")? {
                "2d" => Task::Detection2d,
                "bev" => Task::Bev,
                "3d" => Task::Detection3d,
                t => return Err(bad(format!("unknown task `{t}`"))),
            };
            let difficulty = crate::eval::Difficulty::ALL
                .into_iter()
                .find(|d| d.name() == s(v, "difficulty").unwrap_or(""))
                .ok_or_else(|| bad("unknown difficulty"))?;
            let cfg = EvalConfig::new(
                f(v, "iou")?,
                RecallGrid::from_count(f(v, "recall")? as usize)?,
                difficulty,
                task,
                s(v, "category")?,
            )?;
            let r = evaluate_ap(&labels(field(v, "dets")?)?, &labels(field(v, "gts")?)?, &cfg)?;
            json!({
                "ap": r.ap,
                "num_gt": r.num_gt,
                "true_positives": r.true_positives,
                "false_positives": r.false_positives,
                "false_negatives": r.false_negatives,
                "ignored_detections": r.ignored_detections,
            })
        }
        "depth_errors" => {
            let r = depth_errors(&floats(field(v, "pred")?)?, &floats(field(v, "gt")?)?)?;
            json!({"silog": r.silog, "abs_rel": r.abs_rel, "sq_rel": r.sq_rel, "irmse": r.irmse, "count": r.count})
        }
        "bucketed_depth_errors" => {
            let samples = field(v, "samples")?
                .as_array()
                .ok_or_else(|| bad("`samples` is not an array"))?
                .iter()
                .map(|t| {
                    let t = floats(t)?;
                    match t[..] {
                        [pred, gt, gt_depth] => Ok(DepthSample { pred, gt, gt_depth }),
                        _ => Err(bad("sample needs [pred, gt, gt_depth]")),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let ranges = field(v, "ranges")?
                .as_array()
                .ok_or_else(|| bad("`ranges` is not an array"))?
                .iter()
                .map(|r| {
                    let r = floats(r)?;
                    match r[..] {
                        [lo, hi] => Ok((lo, hi)),
                        _ => Err(bad("range needs [lo, hi]")),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Value::Array(
                bucketed_depth_errors(&samples, &ranges)?
                    .into_iter()
                    .map(|r| json!({"count": r.count, "silog": r.silog, "abs_rel": r.abs_rel, "sq_rel": r.sq_rel, "irmse": r.irmse}))
                    .collect(),
            )
        }
        "focal_variant" => {
            let cfg = FocalConfig::new(f_or(v, "alpha", 2.0)?, f_or(v, "beta", 4.0)?)?;
            let r = focal_variant(f(v, "p")?, f(v, "y")?, &cfg)?;
            json!({"value": r.value, "grad": r.grad})
        }
        "uncertainty_l1" => {
            let pred = UncertainDepthPrediction { depth: f(v, "depth")?, sigma: f(v, "sigma")? };
            let r = uncertainty_l1(&pred, f(v, "d_gt")?)?;
            json!({"value": r.value, "grad": r.grad})
        }
        "total_loss" => {
            let w = LossWeights { lambda_2d: f_or(v, "lambda_2d", 1.0)?, lambda_3d: f_or(v, "lambda_3d", 1.0)? };
            json!(total_loss(f(v, "l_c")?, f(v, "l_2d")?, f(v, "l_3d")?, &w))
        }
        "generate_scenes" => {
            let spec = SyntheticSceneSpec {
                seed: f(v, "seed")? as u64,
                boxes_per_frame: f(v, "boxes_per_frame")? as usize,
                ..Default::default()
            };
            let frames = generate_scenes(&spec, f(v, "n_frames")? as usize)?;
            let mut max_err: f64 = 0.0;
            let mut visible = true;
            let mut count = 0;
            for fr in &frames {
                for r in &fr.labels {
                    count += 1;
                    let b = r.box3d()?;
                    visible &= crate::analysis::fully_visible(&b, &fr.calib.camera, spec.image_size);
                    let p = project_box(&b, &fr.calib.camera)?.ltrb();
                    for (a, e) in p.iter().zip(r.bbox) {
                        max_err = max_err.max((a - e).abs());
                    }
                }
            }
            json!({"frames": frames.len(), "labels": count, "all_visible": visible, "max_reprojection_error_px": max_err})
        }
        "misalignment_report" => {
            let (w, h) = match v.get("image_size") {
                Some(sz) => {
                    let s = floats(sz)?;
                    (s[0], s[1])
                }
                None => MisalignmentConfig::default().image_size,
            };
            let rows = misalignment_report(&frames(v)?, &DEFAULT_DEPTH_BUCKETS, &MisalignmentConfig { image_size: (w, h) });
            misalignment_table(&rows).to_json(raw)
        }
        "depth_spread_table" => {
            let d = SpreadConfig::default();
            let cfg = SpreadConfig {
                h_centers: v.get("h_centers").map(floats).transpose()?.unwrap_or(d.h_centers),
                height_centers: v.get("height_centers").map(floats).transpose()?.unwrap_or(d.height_centers),
                h_tolerance: f_or(v, "h_tolerance", d.h_tolerance)?,
                height_tolerance: f_or(v, "height_tolerance", d.height_tolerance)?,
                source: match v.get("source").and_then(Value::as_str) {
                    None | Some("projected") => HeightSource::Projected,
                    Some("annotated") => HeightSource::Annotated,
                    Some(o) => return Err(bad(format!("unknown source `{o}`"))),
                },
                category: v.get("category").and_then(Value::as_str).unwrap_or(&d.category).to_string(),
            };
            depth_spread_table(&frames(v)?, &cfg).to_table().to_json(raw)
        }
        "sensitivity_sweep" => {
            let d = SweepConfig::car();
            let footprints = match v.get("footprints") {
                Some(fp) => fp
                    .as_array()
                    .ok_or_else(|| bad("`footprints` is not an array"))?
                    .iter()
                    .map(|p| {
                        let p = floats(p)?;
                        Ok((p[0], p[1]))
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => d.footprints,
            };
            let cfg = SweepConfig {
                height: f_or(v, "H", d.height)?,
                h: f_or(v, "h", d.h)?,
                f_v: f_or(v, "f_v", d.f_v)?,
                betas: v.get("betas").map(floats).transpose()?.unwrap_or(d.betas),
                yaws: v.get("yaws").map(floats).transpose()?.unwrap_or(d.yaws),
                footprints,
                model: model(v)?,
            };
            let r = sensitivity_sweep(&cfg)?;
            json!({
                "cells": r.cells.len(),
                "failed": r.cells.iter().filter(|c| c.depth.is_err()).count(),
                "min": r.min,
                "max": r.max,
                "spread": r.spread,
                "spread_exceeds_5m": r.spread.is_some_and(|s| s > 5.0),
            })
        }
        "run" => {
            let dir = tempdir()?;
            let root = dir.path().to_string_lossy().into_owned();
            if let Some(files) = v.get("files") {
                write_tree(dir.path(), files)?;
            }
            let mut args = vec!["geodepth".to_string()];
            for a in field(v, "args")?.as_array().ok_or_else(|| bad("`args` is not an array"))? {
                args.push(a.as_str().ok_or_else(|| bad("arg is not a string"))?.replace("{dir}", &root));
            }
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let code = crate::cli::run(args, &mut out, &mut err);
            let mut files = BTreeMap::new();
            read_tree(dir.path(), dir.path(), &mut files)?;
            json!({
                "exit": code,
                "stdout": String::from_utf8_lossy(&out),
                "files": files,
            })
        }
        "verify_fixtures" => {
            if v.get("missing_dir").and_then(Value::as_bool) == Some(true) {
                let dir = tempdir()?;
                verify_fixtures(&dir.path().join("absent"))?;
                unreachable!("a missing directory is a configuration error");
            }
            let dir = tempdir()?;
            let set = field(v, "fixtures")?;
            std::fs::write(dir.path().join("set.json"), serde_json::to_string(set)?)
                .map_err(|e| Error::io(dir.path(), e))?;
            let report = verify_fixtures(dir.path())?;
            let failed: Vec<&str> = report.iter().filter(|o| !o.passed).map(|o| o.name.as_str()).collect();
            json!({"passed": report.len() - failed.len(), "failed": failed})
        }
        other => return Err(bad(format!("unknown operation `{other}`"))),
    })
}

/// First difference between `actual` and `expected`, or `None` when they agree.
pub fn compare(actual: &Value, expected: &Value, tol: f64, path: &str) -> Option<String> {
    match (actual, expected) {
        (Value::Number(a), Value::Number(e)) => {
            let (a, e) = (a.as_f64()?, e.as_f64()?);
            ((a - e).abs() > tol * (1.0 + e.abs())).then(|| format!("{path}: got {a}, expected {e}"))
        }
        (Value::Array(a), Value::Array(e)) => {
            if a.len() != e.len() {
                return Some(format!("{path}: length {} vs expected {}", a.len(), e.len()));
            }
            a.iter().zip(e).enumerate().find_map(|(i, (x, y))| compare(x, y, tol, &format!("{path}[{i}]")))
        }
        (Value::Object(a), Value::Object(e)) => e.iter().find_map(|(k, ev)| match a.get(k) {
            Some(av) => compare(av, ev, tol, &format!("{path}.{k}")),
            None => Some(format!("{path}.{k}: missing")),
        }),
        _ if actual == expected => None,
        _ => Some(format!("{path}: got {actual}, expected {expected}")),
    }
}

pub fn evaluate_fixture(fx: &GoldenFixture) -> FixtureOutcome {
    let tol = fx.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    let expected_error = fx.expected.as_object().filter(|m| m.len() == 1).and_then(|m| m.get("error")).and_then(Value::as_str);
    let detail = if fx.provenance.oracle.trim().is_empty() {
        Some("provenance oracle description is empty".to_string())
    } else {
        match (run_operation(&fx.operation, &fx.input), expected_error) {
            (Ok(_), Some(kind)) => Some(format!("expected a {kind} error, got a value")),
            (Ok(v), None) => compare(&v, &fx.expected, tol, "$"),
            (Err(e), Some(kind)) if error_kind(&e) == kind => None,
            (Err(e), _) => Some(format!("{} error: {e}", error_kind(&e))),
        }
    };
    FixtureOutcome {
        name: fx.name.clone(),
        operation: fx.operation.clone(),
        passed: detail.is_none(),
        detail: detail.unwrap_or_default(),
    }
}

/// Every fixture in `dir`, in file-name order.
pub fn load_fixtures(dir: &Path) -> Result<Vec<GoldenFixture>> {
    if !dir.is_dir() {
        return Err(Error::Config(format!("fixture directory {} does not exist", dir.display())));
    }
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        let set: Vec<GoldenFixture> = serde_json::from_str(&text)
            .map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
        out.extend(set);
    }
    Ok(out)
}

/// Loads and evaluates every fixture in `dir`.
pub fn verify_fixtures(dir: &Path) -> Result<Vec<FixtureOutcome>> {
    Ok(load_fixtures(dir)?.iter().map(evaluate_fixture).collect())
}
