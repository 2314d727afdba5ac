//! Pinhole camera model.
//!
//! Camera frame is right-handed with `x` pointing right, `y` pointing down and
//! `z` pointing forward along the optical axis, so the pixel row `v` grows with
//! `y`. Projection follows a 3×4 matrix of the form
//!
//! ```text
//! | f_u  0   c_u  t_x |
//! | 0    f_v c_v  t_y |
//! | 0    0   1    t_z |
//! ```
//!
//! With a zero translation column this is the plain intrinsic matrix.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Sub};

use crate::error::{Error, Result};

/// Smallest depth accepted anywhere a division by depth happens.
pub const MIN_DEPTH: f64 = 1e-6;

/// A point or vector in the camera frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// A projected pixel together with the depth of the point that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelPoint {
    pub u: f64,
    pub v: f64,
    pub z: f64,
}

/// Intrinsics plus the residual translation column of a rectified projection matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibratedCamera {
    pub f_u: f64,
    pub f_v: f64,
    pub c_u: f64,
    pub c_v: f64,
    pub t_proj: [f64; 3],
}

impl CalibratedCamera {
    /// Camera without a translation column.
    pub fn new(f_u: f64, f_v: f64, c_u: f64, c_v: f64) -> Result<Self> {
        Self::with_translation(f_u, f_v, c_u, c_v, [0.0; 3])
    }

    pub fn with_translation(f_u: f64, f_v: f64, c_u: f64, c_v: f64, t_proj: [f64; 3]) -> Result<Self> {
        if !(f_u > 0.0 && f_v > 0.0) || !f_u.is_finite() || !f_v.is_finite() {
            return Err(Error::domain(
                "camera",
                format!("focal lengths must be positive, got f_u={f_u}, f_v={f_v}"),
            ));
        }
        if ![c_u, c_v, t_proj[0], t_proj[1], t_proj[2]].iter().all(|v| v.is_finite()) {
            return Err(Error::domain("camera", "non-finite principal point or translation"));
        }
        Ok(Self {
            f_u,
            f_v,
            c_u,
            c_v,
            t_proj,
        })
    }

    /// Builds the camera from a row-major 3×4 projection matrix.
    pub fn from_projection(m: &[f64; 12]) -> Result<Self> {
        Self::with_translation(m[0], m[5], m[2], m[6], [m[3], m[7], m[11]])
    }

    /// Row-major 3×4 projection matrix equivalent to this camera.
    pub fn projection_matrix(&self) -> [f64; 12] {
        let [tx, ty, tz] = self.t_proj;
        [
            self.f_u, 0.0, self.c_u, tx, //
            0.0, self.f_v, self.c_v, ty, //
            0.0, 0.0, 1.0, tz,
        ]
    }

    /// The KITTI left color camera (P2) of drive 2011_09_26.
    pub fn kitti_p2() -> Self {
        Self {
            f_u: 721.5377,
            f_v: 721.5377,
            c_u: 609.5593,
            c_v: 172.854,
            t_proj: [44.85728, 0.2163791, 0.002745884],
        }
    }

    fn homogeneous_scale(&self, z: f64) -> f64 {
        z + self.t_proj[2]
    }
}

fn check_depth(op: &'static str, z: f64) -> Result<()> {
    if z.is_finite() && z >= MIN_DEPTH {
        Ok(())
    } else {
        Err(Error::domain(op, format!("point behind the camera or too close (z = {z})")))
    }
}

/// Projects a camera-frame point to pixel coordinates.
pub fn project_point(p: Point3, cam: &CalibratedCamera) -> Result<PixelPoint> {
    check_depth("project_point", p.z)?;
    let w = cam.homogeneous_scale(p.z);
    check_depth("project_point", w)?;
    let [tx, ty, _] = cam.t_proj;
    Ok(PixelPoint {
        u: (cam.f_u * p.x + cam.c_u * p.z + tx) / w,
        v: (cam.f_v * p.y + cam.c_v * p.z + ty) / w,
        z: p.z,
    })
}

/// Inverse of [`project_point`] for a known point depth.
pub fn backproject_pixel(u: f64, v: f64, z: f64, cam: &CalibratedCamera) -> Result<Point3> {
    check_depth("backproject_pixel", z)?;
    let w = cam.homogeneous_scale(z);
    check_depth("backproject_pixel", w)?;
    let [tx, ty, _] = cam.t_proj;
    Ok(Point3 {
        x: (u * w - cam.c_u * z - tx) / cam.f_u,
        y: (v * w - cam.c_v * z - ty) / cam.f_v,
        z,
    })
}

/// Dense row-major grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    cells: Vec<T>,
}

impl<T> Grid<T> {
    pub fn from_vec(rows: usize, cols: usize, cells: Vec<T>) -> Result<Self> {
        if rows * cols != cells.len() {
            return Err(Error::Input(format!(
                "grid of {rows}x{cols} needs {} cells, got {}",
                rows * cols,
                cells.len()
            )));
        }
        Ok(Self { rows, cols, cells })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&T> {
        if row < self.rows && col < self.cols {
            self.cells.get(row * self.cols + col)
        } else {
            None
        }
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }
}

/// Depth image where `None` marks cells without a measurement.
pub type DepthMap = Grid<Option<f64>>;

/// Per-pixel 3D points; `None` is the invalid marker.
pub type PointMap = Grid<Option<Point3>>;

/// Lifts every valid depth cell to a camera-frame point using the pixel
/// center convention `(u, v) = (col, row)`.
///
/// Cells that are missing or have depth below [`MIN_DEPTH`] become `None`.
pub fn backproject_depth_map(depth: &DepthMap, cam: &CalibratedCamera) -> Result<PointMap> {
    if depth.cells.is_empty() {
        return Err(Error::Input("depth map is empty".into()));
    }
    let cols = depth.cols;
    let cells = depth
        .cells
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let (row, col) = (i / cols, i % cols);
            d.and_then(|z| backproject_pixel(col as f64, row as f64, z, cam).ok())
        })
        .collect();
    Ok(Grid {
        rows: depth.rows,
        cols,
        cells,
    })
}

/// Vertical angle between the ray through pixel row `v_o` and the horizontal plane.
pub fn beta_from_pixel(v_o: f64, cam: &CalibratedCamera) -> f64 {
    ((v_o - cam.c_v) / cam.f_v).atan()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cam() -> CalibratedCamera {
        CalibratedCamera::new(700.0, 700.0, 600.0, 180.0).unwrap()
    }

    #[test]
    fn optical_axis_hits_principal_point() {
        let px = project_point(Point3::new(0.0, 0.0, 10.0), &cam()).unwrap();
        assert_eq!((px.u, px.v, px.z), (600.0, 180.0, 10.0));
    }

    #[test]
    fn lateral_offset() {
        let px = project_point(Point3::new(1.0, 0.0, 10.0), &cam()).unwrap();
        assert_eq!((px.u, px.v), (670.0, 180.0));
        let p = backproject_pixel(670.0, 180.0, 10.0, &cam()).unwrap();
        assert_eq!(p, Point3::new(1.0, 0.0, 10.0));
        let p = backproject_pixel(600.0, 180.0, 10.0, &cam()).unwrap();
        assert_eq!(p, Point3::new(0.0, 0.0, 10.0));
    }

    #[test]
    fn homogeneous_multiply_with_translation() {
        let m = [
            721.5377, 0.0, 609.5593, 44.85728, 0.0, 721.5377, 172.854, 0.2163791, 0.0, 0.0, 1.0,
            0.002745884,
        ];
        let cam = CalibratedCamera::from_projection(&m).unwrap();
        let p = [2.0, 1.65, 20.0, 1.0];
        let row = |r: usize| (0..4).map(|c| m[r * 4 + c] * p[c]).sum::<f64>();
        let (a, b, w) = (row(0), row(1), row(2));
        let px = project_point(Point3::new(2.0, 1.65, 20.0), &cam).unwrap();
        assert!((px.u - a / w).abs() < 1e-9);
        assert!((px.v - b / w).abs() < 1e-9);
        assert_eq!(cam.projection_matrix(), m);
    }

    #[test]
    fn rejects_points_behind_camera() {
        assert!(matches!(
            project_point(Point3::new(0.0, 0.0, -1.0), &cam()),
            Err(Error::Domain { .. })
        ));
        assert!(project_point(Point3::new(0.0, 0.0, 0.0), &cam()).is_err());
        assert!(backproject_pixel(1.0, 1.0, 0.0, &cam()).is_err());
        assert!(CalibratedCamera::new(0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn beta_cases() {
        let c = cam();
        assert_eq!(beta_from_pixel(c.c_v, &c), 0.0);
        assert!((beta_from_pixel(c.c_v + c.f_v, &c) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let bottom = Point3::new(1.3, 1.65, 23.0);
        let px = project_point(bottom, &c).unwrap();
        let beta = beta_from_pixel(px.v, &c);
        assert!((bottom.z * beta.tan() - bottom.y).abs() / bottom.y < 1e-9);
    }

    #[test]
    fn depth_map_cases() {
        let c = cam();
        let single = Grid::from_vec(1, 1, vec![Some(10.0)]).unwrap();
        let shifted = CalibratedCamera::new(700.0, 700.0, 0.0, 0.0).unwrap();
        let out = backproject_depth_map(&single, &shifted).unwrap();
        assert_eq!(out.get(0, 0).unwrap().unwrap(), Point3::new(0.0, 0.0, 10.0));

        let plane = Grid::from_vec(3, 4, vec![Some(7.5); 12]).unwrap();
        let out = backproject_depth_map(&plane, &c).unwrap();
        assert!(out.cells().iter().all(|p| p.unwrap().z == 7.5));

        let holes = Grid::from_vec(1, 3, vec![None, Some(-2.0), Some(3.0)]).unwrap();
        let out = backproject_depth_map(&holes, &c).unwrap();
        assert_eq!(out.cells()[0], None);
        assert_eq!(out.cells()[1], None);
        assert!(out.cells()[2].is_some());

        let empty: DepthMap = Grid::from_vec(0, 0, vec![]).unwrap();
        assert!(backproject_depth_map(&empty, &c).is_err());
    }
}
