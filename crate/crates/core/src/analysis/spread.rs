//! Depth spread of objects sharing the same projected height and 3D height.

use serde::{Deserialize, Serialize};

use crate::geometry::project_box;
use crate::kitti::Frame;
use crate::report::{Cell, Table};

/// Which 2D height is used for bucketing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightSource {
    /// Height of the box projected from the 3D annotation.
    #[default]
    Projected,
    /// Height of the annotated 2D box.
    Annotated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadConfig {
    /// Bucket centers for the 2D height, pixels.
    pub h_centers: Vec<f64>,
    /// Bucket centers for the 3D height, meters.
    pub height_centers: Vec<f64>,
    /// A sample belongs to a bucket when `center - tol <= value < center + tol`.
    pub h_tolerance: f64,
    pub height_tolerance: f64,
    pub source: HeightSource,
    pub category: String,
}

impl Default for SpreadConfig {
    fn default() -> Self {
        Self {
            h_centers: vec![30.0, 35.0],
            height_centers: vec![1.49, 1.50, 1.51, 1.52],
            h_tolerance: 0.5,
            height_tolerance: 0.005,
            source: HeightSource::Projected,
            category: "Car".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadCell {
    pub max: f64,
    pub min: f64,
    pub diff: f64,
    pub count: usize,
}

impl SpreadCell {
    fn of(values: &[f64]) -> Option<Self> {
        let max = values.iter().copied().reduce(f64::max)?;
        let min = values.iter().copied().reduce(f64::min)?;
        Some(Self {
            max,
            min,
            diff: max - min,
            count: values.len(),
        })
    }
}

/// Rows follow `h_centers`, columns follow `height_centers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthSpreadTable {
    pub config: SpreadConfig,
    pub cells: Vec<Vec<Option<SpreadCell>>>,
    /// Per row: spread of the per-column mean depths (`count` is the number
    /// of non-empty columns).
    pub average: Vec<Option<SpreadCell>>,
}

/// `(2D height, 3D height, depth)` of one object.
pub type SpreadSample = (f64, f64, f64);

/// Absorbs representation error so decimal edges such as `1.51 - 0.005` fall
/// on the intended side.
const EDGE_EPS: f64 = 1e-9;

fn in_bucket(v: f64, center: f64, tol: f64) -> bool {
    let d = v - center;
    d >= -tol - EDGE_EPS && d < tol - EDGE_EPS
}

pub fn spread_samples(frames: &[Frame], cfg: &SpreadConfig) -> Vec<SpreadSample> {
    let mut out = Vec::new();
    for f in frames {
        for rec in f.labels.iter().filter(|r| r.category == cfg.category && !r.is_ignorable()) {
            let h = match cfg.source {
                HeightSource::Annotated => rec.bbox_height(),
                HeightSource::Projected => {
                    match rec.box3d().and_then(|b| project_box(&b, &f.calib.camera)) {
                        Ok(bb) => bb.h,
                        Err(_) => continue,
                    }
                }
            };
            out.push((h, rec.dims[0], rec.location[2]));
        }
    }
    out
}

pub fn spread_from_samples(samples: &[SpreadSample], cfg: &SpreadConfig) -> DepthSpreadTable {
    let mut cells = Vec::with_capacity(cfg.h_centers.len());
    let mut average = Vec::with_capacity(cfg.h_centers.len());
    for &hc in &cfg.h_centers {
        let row: Vec<Option<SpreadCell>> = cfg
            .height_centers
            .iter()
            .map(|&hh| {
                let depths: Vec<f64> = samples
                    .iter()
                    .filter(|(h, height, _)| in_bucket(*h, hc, cfg.h_tolerance) && in_bucket(*height, hh, cfg.height_tolerance))
                    .map(|s| s.2)
                    .collect();
                SpreadCell::of(&depths)
            })
            .collect();
        let means: Vec<f64> = cfg
            .height_centers
            .iter()
            .filter_map(|&hh| {
                let ds: Vec<f64> = samples
                    .iter()
                    .filter(|(h, height, _)| in_bucket(*h, hc, cfg.h_tolerance) && in_bucket(*height, hh, cfg.height_tolerance))
                    .map(|s| s.2)
                    .collect();
                (!ds.is_empty()).then(|| ds.iter().sum::<f64>() / ds.len() as f64)
            })
            .collect();
        average.push(SpreadCell::of(&means));
        cells.push(row);
    }
    DepthSpreadTable {
        config: cfg.clone(),
        cells,
        average,
    }
}

pub fn depth_spread_table(frames: &[Frame], cfg: &SpreadConfig) -> DepthSpreadTable {
    spread_from_samples(&spread_samples(frames, cfg), cfg)
}

impl DepthSpreadTable {
    pub fn cell(&self, h_center: f64, height_center: f64) -> Option<SpreadCell> {
        let i = self.config.h_centers.iter().position(|&c| c == h_center)?;
        let j = self.config.height_centers.iter().position(|&c| c == height_center)?;
        self.cells[i][j]
    }

    /// Long format: one row per `(h, H)` cell plus one `avg` row per `h`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["h", "height", "count", "max", "min", "diff"]);
        let push = |t: &mut Table, h: f64, label: Cell, c: &Option<SpreadCell>| {
            let mut row = vec![Cell::Num(h), label];
            match c {
                Some(c) => row.extend([Cell::Int(c.count as i64), Cell::Num(c.max), Cell::Num(c.min), Cell::Num(c.diff)]),
                None => row.extend([Cell::Int(0), Cell::Empty, Cell::Empty, Cell::Empty]),
            }
            t.push(row);
        };
        for (i, &h) in self.config.h_centers.iter().enumerate() {
            push(&mut t, h, Cell::Text("avg".into()), &self.average[i]);
            for (j, &hh) in self.config.height_centers.iter().enumerate() {
                push(&mut t, h, Cell::Num(hh), &self.cells[i][j]);
            }
        }
        t
    }
}
