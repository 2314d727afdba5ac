//! Per-object depth error metrics with the usual benchmark scaling.
//!
//! With `d = ln(pred) - ln(gt)`:
//!
//! | metric   | definition                                  |
//! |----------|---------------------------------------------|
//! | SILog    | `100·sqrt(mean(d²) - mean(d)²)`             |
//! | absRel   | `100·mean(|pred - gt| / gt)`                |
//! | sqRel    | `100·mean((pred - gt)² / gt)`               |
//! | iRMSE    | `1000·sqrt(mean((1/pred - 1/gt)²))`, 1/km   |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthErrorStats {
    pub silog: f64,
    pub abs_rel: f64,
    pub sq_rel: f64,
    pub irmse: f64,
    pub count: usize,
    pub range: (f64, f64),
}

pub fn depth_errors(pred: &[f64], gt: &[f64]) -> Result<DepthErrorStats> {
    if pred.len() != gt.len() {
        return Err(Error::Input(format!(
            "prediction and ground truth lengths differ ({} vs {})",
            pred.len(),
            gt.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::Input("no depth samples".into()));
    }
    if let Some(bad) = pred.iter().chain(gt).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Input(format!("depths must be positive and finite, got {bad}")));
    }
    let n = pred.len() as f64;
    let (mut sum_d, mut sum_d2, mut abs_rel, mut sq_rel, mut inv2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&p, &g) in pred.iter().zip(gt) {
        let d = p.ln() - g.ln();
        sum_d += d;
        sum_d2 += d * d;
        abs_rel += (p - g).abs() / g;
        sq_rel += (p - g) * (p - g) / g;
        let di = 1.0 / p - 1.0 / g;
        inv2 += di * di;
    }
    let mean_d = sum_d / n;
    // clamp the tiny negative values left by cancellation when d is constant
    let var = (sum_d2 / n - mean_d * mean_d).max(0.0);
    let (lo, hi) = gt.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &g| (a.min(g), b.max(g)));
    Ok(DepthErrorStats {
        silog: 100.0 * var.sqrt(),
        abs_rel: 100.0 * abs_rel / n,
        sq_rel: 100.0 * sq_rel / n,
        irmse: 1000.0 * (inv2 / n).sqrt(),
        count: pred.len(),
        range: (lo, hi),
    })
}

/// One evaluated object: predicted depth, ground-truth depth, and the depth
/// used for bucketing (usually equal to the ground truth).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthSample {
    pub pred: f64,
    pub gt: f64,
    pub gt_depth: f64,
}

pub const DEFAULT_RANGES: [(f64, f64); 4] = [(0.0, 10.0), (0.0, 20.0), (0.0, 30.0), (0.0, 40.0)];

/// Statistics per range over samples with `lo <= gt_depth < hi`. Empty
/// buckets report a zero count and zero metrics.
pub fn bucketed_depth_errors(samples: &[DepthSample], ranges: &[(f64, f64)]) -> Result<Vec<DepthErrorStats>> {
    ranges
        .iter()
        .map(|&(lo, hi)| {
            let (pred, gt): (Vec<f64>, Vec<f64>) = samples
                .iter()
                .filter(|s| s.gt_depth >= lo && s.gt_depth < hi)
                .map(|s| (s.pred, s.gt))
                .unzip();
            if pred.is_empty() {
                return Ok(DepthErrorStats {
                    silog: 0.0,
                    abs_rel: 0.0,
                    sq_rel: 0.0,
                    irmse: 0.0,
                    count: 0,
                    range: (lo, hi),
                });
            }
            Ok(DepthErrorStats {
                range: (lo, hi),
                ..depth_errors(&pred, &gt)?
            })
        })
        .collect()
}

pub fn depth_stats_table(stats: &[DepthErrorStats]) -> Table {
    let mut t = Table::new(&["range_lo", "range_hi", "count", "silog", "abs_rel", "sq_rel", "irmse"]);
    for s in stats {
        t.push(vec![
            Cell::Num(s.range.0),
            Cell::Num(s.range.1),
            Cell::Int(s.count as i64),
            Cell::Num(s.silog),
            Cell::Num(s.abs_rel),
            Cell::Num(s.sq_rel),
            Cell::Num(s.irmse),
        ]);
    }
    t
}
