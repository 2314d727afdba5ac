//! Geometry-guided depth recovery from a projected 2D box height.
//!
//! The forward model expresses the projected height `h` of a box as a function
//! of its bottom-center depth `z`, using the vertical angle `β` (so the bottom
//! center sits at `y = z·tan β`), the 3D height `H`, the maximal corner depth
//! offset `Δz` and the vertical focal length `f_v`. Clearing denominators turns
//! it into a quadratic in `z` whose positive root is the closed-form depth
//!
//! ```text
//! z = b/2 + sqrt(b² + 4c)/2,   b = (f_v/h)·(2·tan β·Δz + H)
//! ```
//!
//! Two vertical pairings are supported, see [`HeightModel`]. They share `b`
//! and differ only in the sign of the `H·f_v·Δz/h` term in `c`. The full
//! derivation lives in `docs/depth-formula.md`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::{beta_from_pixel, project_point, CalibratedCamera};
use crate::error::{Error, Result};
use crate::geometry::{delta_z_max, project_box, Box3D};
use crate::report::{Cell, Table};

/// Projected heights below this are rejected by the closed-form inverse.
pub const MIN_BOX_HEIGHT_PX: f64 = 0.5;

/// Which corners realize the extreme image rows in the forward model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeightModel {
    /// The row at `y + H` pairs with the near depth `z - Δz` and the row at `y`
    /// with the far depth `z + Δz`:
    /// `h = f_v·(y + H)/(z - Δz) - f_v·y/(z + Δz)`.
    ///
    /// The quadratic has roots of opposite sign, so the inverse is unique for
    /// every `z > Δz`.
    #[default]
    Paired,
    /// The bottom face `y` pairs with the near depth and the top face `y - H`
    /// with the far depth: `h = f_v·y/(z - Δz) - f_v·(y - H)/(z + Δz)`.
    ///
    /// This is the exact corner geometry of a box resting below the camera
    /// (`y > H`, y pointing down), so the inverse recovers the true depth of
    /// such boxes. The quadratic can have two roots above `Δz`; the larger is
    /// returned.
    BottomAnchored,
}

impl HeightModel {
    fn height_term_sign(self) -> f64 {
        match self {
            HeightModel::Paired => 1.0,
            HeightModel::BottomAnchored => -1.0,
        }
    }
}

/// The inputs of the closed-form depth: everything except `z` itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryObservation {
    /// Projected 2D box height, pixels.
    pub h: f64,
    /// Vertical angle of the bottom center, radians.
    pub beta: f64,
    /// 3D box height, meters.
    pub height: f64,
    /// Maximal corner depth offset, meters.
    pub dz: f64,
    pub f_v: f64,
}

impl GeometryObservation {
    pub fn new(h: f64, beta: f64, height: f64, dz: f64, f_v: f64) -> Result<Self> {
        let obs = Self { h, beta, height, dz, f_v };
        obs.validate("GeometryObservation")?;
        Ok(obs)
    }

    fn validate(&self, op: &'static str) -> Result<()> {
        let Self { h, beta, height, dz, f_v } = *self;
        if !(h > 0.0 && height > 0.0 && dz >= 0.0 && f_v > 0.0) || ![h, beta, height, dz, f_v].iter().all(|v| v.is_finite()) {
            return Err(Error::domain(
                op,
                format!("need h > 0, H > 0, dz >= 0, f_v > 0; got h={h}, beta={beta}, H={height}, dz={dz}, f_v={f_v}"),
            ));
        }
        Ok(())
    }

    /// Observation of a box as seen through `cam`: exact corner-based `h`, `β`
    /// from the projected bottom center and `Δz` from the footprint and yaw.
    pub fn of_box(b: &Box3D, cam: &CalibratedCamera) -> Result<Self> {
        let h = project_box(b, cam)?.h;
        let v_o = project_point(b.bottom_center, cam)?.v;
        Self::new(
            h,
            beta_from_pixel(v_o, cam),
            b.height,
            delta_z_max(b.width, b.length, b.yaw),
            cam.f_v,
        )
    }

    /// The shared linear coefficient `b`, which is also the v1 depth.
    fn linear_coefficient(&self) -> f64 {
        self.f_v / self.h * (2.0 * self.beta.tan() * self.dz + self.height)
    }
}

/// Forward model under the default [`HeightModel::Paired`] pairing.
pub fn height_forward(z: f64, beta: f64, height: f64, dz: f64, f_v: f64) -> Result<f64> {
    height_forward_with(HeightModel::Paired, z, beta, height, dz, f_v)
}

pub fn height_forward_with(model: HeightModel, z: f64, beta: f64, height: f64, dz: f64, f_v: f64) -> Result<f64> {
    if !(z > dz) || !z.is_finite() {
        return Err(Error::domain(
            "height_forward",
            format!("z = {z} must exceed dz = {dz} (near corner at or behind the camera)"),
        ));
    }
    let y = z * beta.tan();
    let (near_row, far_row) = match model {
        HeightModel::Paired => (y + height, y),
        HeightModel::BottomAnchored => (y, y - height),
    };
    Ok(f_v * near_row / (z - dz) - f_v * far_row / (z + dz))
}

/// Closed-form depth under the default [`HeightModel::Paired`] pairing.
pub fn depth_full(obs: &GeometryObservation) -> Result<f64> {
    depth_full_with(obs, HeightModel::Paired)
}

pub fn depth_full_with(obs: &GeometryObservation, model: HeightModel) -> Result<f64> {
    obs.validate("depth_full")?;
    if obs.h < MIN_BOX_HEIGHT_PX {
        return Err(Error::domain(
            "depth_full",
            format!("projected height {} px is below the {MIN_BOX_HEIGHT_PX} px floor", obs.h),
        ));
    }
    let b = obs.linear_coefficient();
    let c = obs.dz.mul_add(obs.dz, model.height_term_sign() * obs.height * obs.f_v / obs.h * obs.dz);
    let disc = b.mul_add(b, 4.0 * c);
    if !(disc >= 0.0) {
        return Err(Error::domain(
            "depth_full",
            format!(
                "negative discriminant {disc} for h={}, beta={}, H={}, dz={}, f_v={}",
                obs.h, obs.beta, obs.height, obs.dz, obs.f_v
            ),
        ));
    }
    Ok(0.5 * b + 0.5 * disc.sqrt())
}

/// First-term approximation `z = (f_v/h)·(2·tan β·Δz + H)`.
pub fn depth_v1(obs: &GeometryObservation) -> Result<f64> {
    obs.validate("depth_v1")?;
    Ok(obs.linear_coefficient())
}

/// Scale factor of the pose-free approximation `z = k·H/h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthV2Scale(f64);

impl DepthV2Scale {
    pub fn new(k: f64) -> Result<Self> {
        if k > 0.0 && k.is_finite() {
            Ok(Self(k))
        } else {
            Err(Error::domain("DepthV2Scale", format!("scale must be positive, got {k}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

pub fn depth_v2(h: f64, height: f64, scale: DepthV2Scale) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain("depth_v2", format!("h must be positive, got {h}")));
    }
    Ok(scale.0 * height / h)
}

/// Which closed form to use when recovering depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    Full,
    V1,
    V2,
}

/// Recovers depth with the chosen formula; `v2` uses `k = f_v`.
pub fn recover_depth(obs: &GeometryObservation, formula: Formula, model: HeightModel) -> Result<f64> {
    match formula {
        Formula::Full => depth_full_with(obs, model),
        Formula::V1 => depth_v1(obs),
        Formula::V2 => depth_v2(obs.h, obs.height, DepthV2Scale::new(obs.f_v)?),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulaDepths {
    pub full: f64,
    pub v1: f64,
    pub v2: f64,
}

/// One row of [`compare_formulas`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaComparison {
    pub index: usize,
    pub z_true: f64,
    pub observation: Option<GeometryObservation>,
    /// Recovered depths, or the reason this box was flagged.
    pub depths: Result<FormulaDepths, String>,
}

impl FormulaComparison {
    pub fn abs_errors(&self) -> Option<[f64; 3]> {
        let d = self.depths.as_ref().ok()?;
        Some([d.full, d.v1, d.v2].map(|z| (z - self.z_true).abs()))
    }

    pub fn rel_errors(&self) -> Option<[f64; 3]> {
        self.abs_errors().map(|e| e.map(|v| v / self.z_true))
    }
}

/// Recovers every box's depth from its exact projected height with all three
/// formulas. Per-box failures become flagged rows; output order follows input.
pub fn compare_formulas(boxes: &[Box3D], cam: &CalibratedCamera, model: HeightModel) -> Vec<FormulaComparison> {
    boxes
        .par_iter()
        .enumerate()
        .map(|(index, b)| {
            let z_true = b.bottom_center.z;
            let obs = GeometryObservation::of_box(b, cam);
            let depths = obs.as_ref().map_err(|e| e.to_string()).and_then(|o| {
                let run = |f| recover_depth(o, f, model).map_err(|e| e.to_string());
                Ok(FormulaDepths {
                    full: run(Formula::Full)?,
                    v1: run(Formula::V1)?,
                    v2: run(Formula::V2)?,
                })
            });
            FormulaComparison {
                index,
                z_true,
                observation: obs.ok(),
                depths,
            }
        })
        .collect()
}

pub const COMPARISON_HEADER: [&str; 15] = [
    "index", "z_true", "h", "beta", "dz", "z_full", "z_v1", "z_v2", "abs_err_full", "abs_err_v1", "abs_err_v2",
    "rel_err_full", "rel_err_v1", "rel_err_v2", "status",
];

pub fn comparison_table(rows: &[FormulaComparison]) -> Table {
    let mut t = Table::new(&COMPARISON_HEADER);
    for r in rows {
        let mut cells = vec![Cell::Int(r.index as i64), Cell::Num(r.z_true)];
        match &r.observation {
            Some(o) => cells.extend([Cell::Num(o.h), Cell::Num(o.beta), Cell::Num(o.dz)]),
            None => cells.extend([Cell::Empty, Cell::Empty, Cell::Empty]),
        }
        match &r.depths {
            Ok(d) => {
                let abs = [d.full, d.v1, d.v2].map(|z| (z - r.z_true).abs());
                cells.extend([d.full, d.v1, d.v2].map(Cell::Num));
                cells.extend(abs.map(Cell::Num));
                cells.extend(abs.map(|e| Cell::Num(e / r.z_true)));
                cells.push(Cell::Text("ok".into()));
            }
            Err(e) => {
                cells.extend(std::iter::repeat_n(Cell::Empty, 9));
                cells.push(Cell::Text(format!("error: {e}")));
            }
        }
        t.push(cells);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_reduces_to_similar_triangles() {
        for model in [HeightModel::Paired, HeightModel::BottomAnchored] {
            let h = height_forward_with(model, 35.0, 0.0, 1.5, 0.0, 700.0).unwrap();
            assert!((h - 30.0).abs() < 1e-12);
        }
        assert!(height_forward(1.0, 0.0, 1.5, 1.0, 700.0).is_err());
    }

    #[test]
    fn forward_matches_hand_expansion() {
        // independent rewrite of the cleared-denominator polynomial form
        let (z, beta, hh, dz, f): (f64, f64, f64, f64, f64) = (20.0, 0.05, 1.5, 1.1, 721.5);
        let t = beta.tan();
        let paired = f * (2.0 * t * dz * z + hh * z + hh * dz) / (z * z - dz * dz);
        let bottom = f * (2.0 * t * dz * z + hh * z - hh * dz) / (z * z - dz * dz);
        assert!((height_forward(z, beta, hh, dz, f).unwrap() - paired).abs() < 1e-10);
        assert!((height_forward_with(HeightModel::BottomAnchored, z, beta, hh, dz, f).unwrap() - bottom).abs() < 1e-10);
    }

    #[test]
    fn degenerate_footprint() {
        let obs = GeometryObservation::new(30.0, 0.0, 1.5, 0.0, 700.0).unwrap();
        assert_eq!(depth_full(&obs).unwrap(), 35.0);
        assert_eq!(depth_v1(&obs).unwrap(), 35.0);
        assert_eq!(depth_v2(30.0, 1.5, DepthV2Scale::new(700.0).unwrap()).unwrap(), 35.0);
    }

    #[test]
    fn round_trip_both_models() {
        let (z, beta, hh, dz, f) = (20.0, 0.05, 1.5, 1.1, 721.5);
        for model in [HeightModel::Paired, HeightModel::BottomAnchored] {
            let h = height_forward_with(model, z, beta, hh, dz, f).unwrap();
            let obs = GeometryObservation::new(h, beta, hh, dz, f).unwrap();
            let back = depth_full_with(&obs, model).unwrap();
            assert!((back - z).abs() / z < 1e-9, "{model:?}: {back}");
        }
    }

    #[test]
    fn v1_is_the_linear_coefficient() {
        let obs = GeometryObservation::new(30.0, 0.07, 1.5, 1.3, 721.0).unwrap();
        let expected = 721.0 / 30.0 * (2.0 * 0.07f64.tan() * 1.3 + 1.5);
        assert_eq!(depth_v1(&obs).unwrap(), expected);
        let flat = GeometryObservation { beta: 0.0, ..obs };
        assert!((depth_v1(&flat).unwrap() - 721.0 * 1.5 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn v2_scaling() {
        let k = DepthV2Scale::new(700.0).unwrap();
        assert_eq!(depth_v2(60.0, 1.5, k).unwrap() * 2.0, depth_v2(30.0, 1.5, k).unwrap());
        assert!(depth_v2(0.0, 1.5, k).is_err());
        assert!(DepthV2Scale::new(0.0).is_err());
    }

    #[test]
    fn input_validation() {
        assert!(GeometryObservation::new(0.0, 0.0, 1.5, 0.0, 700.0).is_err());
        assert!(GeometryObservation::new(10.0, 0.0, 1.5, -1.0, 700.0).is_err());
        let tiny = GeometryObservation { h: 0.4, beta: 0.0, height: 1.5, dz: 0.0, f_v: 700.0 };
        assert!(matches!(depth_full(&tiny), Err(Error::Domain { .. })));
    }

    #[test]
    fn bottom_anchored_negative_discriminant_is_reported() {
        // no bottom-anchored box with this footprint projects to this height
        let obs = GeometryObservation::new(100.0, -0.1, 1.0, 3.0, 700.0).unwrap();
        match depth_full_with(&obs, HeightModel::BottomAnchored) {
            Err(Error::Domain { detail, .. }) => assert!(detail.contains("discriminant")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn larger_height_means_nearer() {
        let a = GeometryObservation::new(30.0, 0.04, 1.5, 1.5, 721.0).unwrap();
        let b = GeometryObservation { h: 31.0, ..a };
        assert!(depth_full(&b).unwrap() < depth_full(&a).unwrap());
    }

    #[test]
    fn empty_comparison() {
        let cam = CalibratedCamera::kitti_p2();
        assert!(compare_formulas(&[], &cam, HeightModel::Paired).is_empty());
    }
}
