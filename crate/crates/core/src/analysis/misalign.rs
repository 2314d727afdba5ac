//! Agreement between annotated 2D boxes and the 2D boxes obtained by
//! projecting the 3D annotation, stratified by depth.

use serde::{Deserialize, Serialize};

use crate::eval::iou::iou_ltrb;
use crate::geometry::project_box;
use crate::kitti::Frame;
use crate::report::{Cell, Table};

pub const DEFAULT_DEPTH_BUCKETS: [(f64, f64); 4] = [(0.0, 10.0), (10.0, 20.0), (20.0, 40.0), (40.0, f64::INFINITY)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisalignmentRow {
    pub range: (f64, f64),
    /// Objects whose projected box lies inside the image.
    pub count: usize,
    pub mean_iou: f64,
    pub mean_du: f64,
    pub mean_dv: f64,
    pub mean_dw: f64,
    pub mean_dh: f64,
    /// Objects whose projected box crosses the image border; excluded from the means.
    pub truncated: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MisalignmentConfig {
    pub image_size: (f64, f64),
}

impl Default for MisalignmentConfig {
    fn default() -> Self {
        Self {
            image_size: (1242.0, 375.0),
        }
    }
}

#[derive(Default)]
struct Acc {
    n: usize,
    iou: f64,
    du: f64,
    dv: f64,
    dw: f64,
    dh: f64,
    truncated: usize,
}

/// Per-bucket statistics over every non-ignorable label. Buckets without any
/// object are left out. Labels whose box projects behind the camera are skipped.
pub fn misalignment_report(frames: &[Frame], buckets: &[(f64, f64)], cfg: &MisalignmentConfig) -> Vec<MisalignmentRow> {
    let mut acc: Vec<Acc> = buckets.iter().map(|_| Acc::default()).collect();
    for frame in frames {
        for rec in frame.labels.iter().filter(|r| !r.is_ignorable()) {
            let Ok(b3) = rec.box3d() else { continue };
            let Ok(proj) = project_box(&b3, &frame.calib.camera) else { continue };
            let z = b3.bottom_center.z;
            let Some(k) = buckets.iter().position(|&(lo, hi)| z >= lo && z < hi) else { continue };
            let a = &mut acc[k];
            let [l, t, r, btm] = proj.ltrb();
            if l < 0.0 || t < 0.0 || r > cfg.image_size.0 || btm > cfg.image_size.1 {
                a.truncated += 1;
                continue;
            }
            let ann = rec.box2d();
            a.n += 1;
            a.iou += iou_ltrb(rec.bbox, proj.ltrb());
            a.du += (ann.u - proj.u).abs();
            a.dv += (ann.v - proj.v).abs();
            a.dw += (ann.w - proj.w).abs();
            a.dh += (ann.h - proj.h).abs();
        }
    }
    buckets
        .iter()
        .zip(acc)
        .filter(|(_, a)| a.n + a.truncated > 0)
        .map(|(&range, a)| {
            let mean = |s: f64| if a.n == 0 { 0.0 } else { s / a.n as f64 };
            MisalignmentRow {
                range,
                count: a.n,
                mean_iou: mean(a.iou),
                mean_du: mean(a.du),
                mean_dv: mean(a.dv),
                mean_dw: mean(a.dw),
                mean_dh: mean(a.dh),
                truncated: a.truncated,
            }
        })
        .collect()
}

pub fn misalignment_table(rows: &[MisalignmentRow]) -> Table {
    let mut t = Table::new(&[
        "range_lo", "range_hi", "count", "mean_iou", "mean_du", "mean_dv", "mean_dw", "mean_dh", "truncated",
    ]);
    for r in rows {
        t.push(vec![
            Cell::Num(r.range.0),
            Cell::Num(r.range.1),
            Cell::Int(r.count as i64),
            Cell::Num(r.mean_iou),
            Cell::Num(r.mean_du),
            Cell::Num(r.mean_dv),
            Cell::Num(r.mean_dw),
            Cell::Num(r.mean_dh),
            Cell::Int(r.truncated as i64),
        ]);
    }
    t
}
