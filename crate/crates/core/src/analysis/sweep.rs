//! How much the closed-form depth moves when only the vertical angle and the
//! yaw change, holding the 2D height `h` and the 3D height `H` fixed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{depth_full_with, GeometryObservation, HeightModel};
use crate::error::{Error, Result};
use crate::geometry::delta_z_max;
use crate::report::{Cell, Table};

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub height: f64,
    pub h: f64,
    pub f_v: f64,
    pub betas: Vec<f64>,
    pub yaws: Vec<f64>,
    /// `(W, L)` pairs in meters.
    pub footprints: Vec<(f64, f64)>,
    pub model: HeightModel,
}

impl SweepConfig {
    /// A 1.51 m tall car seen 30 px tall by a KITTI-like camera.
    pub fn car() -> Self {
        Self {
            height: 1.51,
            h: 30.0,
            f_v: 721.5377,
            betas: linspace(-0.05, 0.10, 31),
            yaws: linspace(-std::f64::consts::PI, std::f64::consts::PI, 73),
            footprints: vec![(1.63, 3.88), (1.5, 3.5), (1.8, 4.5)],
            model: HeightModel::default(),
        }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self::car()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub width: f64,
    pub length: f64,
    pub beta: f64,
    pub yaw: f64,
    pub dz: f64,
    /// `Err` holds the formula's domain error message.
    pub depth: Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    /// Extremes over the cells that produced a depth; `None` when none did.
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub spread: Option<f64>,
}

/// Evaluates the closed-form depth over footprints × β × yaw, in that nesting order.
pub fn sensitivity_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    if cfg.betas.is_empty() || cfg.yaws.is_empty() || cfg.footprints.is_empty() {
        return Err(Error::Config("sensitivity sweep grids must be non-empty".into()));
    }
    let combos: Vec<((f64, f64), f64, f64)> = cfg
        .footprints
        .iter()
        .flat_map(|&fp| cfg.betas.iter().flat_map(move |&b| cfg.yaws.iter().map(move |&r| (fp, b, r))))
        .collect();
    let cells: Vec<SweepCell> = combos
        .par_iter()
        .map(|&((width, length), beta, yaw)| {
            let dz = delta_z_max(width, length, yaw);
            let depth = GeometryObservation::new(cfg.h, beta, cfg.height, dz, cfg.f_v)
                .and_then(|o| depth_full_with(&o, cfg.model))
                .map_err(|e| e.to_string());
            SweepCell { width, length, beta, yaw, dz, depth }
        })
        .collect();
    let ok = cells.iter().filter_map(|c| c.depth.as_ref().ok().copied());
    let min = ok.clone().reduce(f64::min);
    let max = ok.reduce(f64::max);
    let spread = min.zip(max).map(|(lo, hi)| hi - lo);
    Ok(SweepResult { cells, min, max, spread })
}

impl SweepResult {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["width", "length", "beta", "yaw", "dz", "depth", "status"]);
        for c in &self.cells {
            let (depth, status) = match &c.depth {
                Ok(z) => (Cell::Num(*z), Cell::Text("ok".into())),
                Err(e) => (Cell::Empty, Cell::Text(e.clone())),
            };
            t.push(vec![
                Cell::Num(c.width),
                Cell::Num(c.length),
                Cell::Num(c.beta),
                Cell::Num(c.yaw),
                Cell::Num(c.dz),
                depth,
                status,
            ]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_grid_has_zero_spread() {
        let cfg = SweepConfig {
            betas: vec![0.0],
            yaws: vec![0.0],
            footprints: vec![(0.0, 0.0)],
            ..SweepConfig::car()
        };
        let r = sensitivity_sweep(&cfg).unwrap();
        assert_eq!(r.spread, Some(0.0));
        assert!((r.min.unwrap() - 721.5377 * 1.51 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn car_spread_exceeds_five_meters() {
        for model in [HeightModel::Paired, HeightModel::BottomAnchored] {
            let r = sensitivity_sweep(&SweepConfig { model, ..SweepConfig::car() }).unwrap();
            assert!(r.spread.unwrap() > 5.0, "{model:?}: {:?}", r.spread);
        }
    }

    #[test]
    fn empty_grid_is_rejected() {
        let cfg = SweepConfig { betas: vec![], ..SweepConfig::car() };
        assert!(sensitivity_sweep(&cfg).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-1.0, 1.0, 5);
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
