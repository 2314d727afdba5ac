//! 3D boxes, their corners, projected 2D boxes and the yaw/viewing-angle
//! conversions used by the dataset convention.
//!
//! A box is anchored at its bottom face center. With `y` pointing down the
//! top face sits at `y - H`. Footprint corners are produced by rotating the
//! local offsets `(±L/2, ±W/2)` about the vertical axis:
//!
//! ```text
//! Δx =  cos(r_y)·lx + sin(r_y)·lz
//! Δz = -sin(r_y)·lx + cos(r_y)·lz
//! ```
//!
//! Corner `i` (0..8) uses the sign triple `(sx, sy, sz)` with bit pattern
//! `i = 4·bx + 2·by + bz`, where a clear bit means `-1` and a set bit `+1`.
//! `sx` selects `lx = sx·L/2`, `sz` selects `lz = sz·W/2`, and `sy = -1` is the
//! top face (`Δy = -H`) while `sy = +1` is the bottom face (`Δy = 0`).

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::camera::{beta_from_pixel, project_point, CalibratedCamera, Point3};
use crate::error::{Error, Result};

/// Wraps an angle into `[-π, π)`.
pub fn normalize_angle(a: f64) -> f64 {
    if (-PI..PI).contains(&a) {
        return a;
    }
    let wrapped = (a + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can return exactly 2π for tiny negative inputs
    if wrapped >= PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Oriented 3D box in the camera frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3D {
    pub width: f64,
    pub height: f64,
    pub length: f64,
    pub bottom_center: Point3,
    pub yaw: f64,
}

impl Box3D {
    /// Validates the dimensions and wraps the yaw into `[-π, π)`.
    pub fn new(width: f64, height: f64, length: f64, bottom_center: Point3, yaw: f64) -> Result<Self> {
        check_dims("Box3D", width, height, length)?;
        if !(bottom_center.x.is_finite() && bottom_center.y.is_finite() && bottom_center.z.is_finite() && yaw.is_finite()) {
            return Err(Error::domain("Box3D", "non-finite location or yaw"));
        }
        Ok(Self {
            width,
            height,
            length,
            bottom_center,
            yaw: normalize_angle(yaw),
        })
    }

    pub fn volume(&self) -> f64 {
        self.width * self.height * self.length
    }

    /// Vertical extent `(top, bottom)` in camera `y`.
    pub fn y_extent(&self) -> (f64, f64) {
        (self.bottom_center.y - self.height, self.bottom_center.y)
    }

    /// The four footprint corners as `(x, z)`, counter-clockwise in the x–z plane.
    pub fn footprint(&self) -> [(f64, f64); 4] {
        let (s, c) = self.yaw.sin_cos();
        let (hl, hw) = (self.length / 2.0, self.width / 2.0);
        let local = [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)];
        let mut out = [(0.0, 0.0); 4];
        for (o, (lx, lz)) in out.iter_mut().zip(local) {
            *o = (
                self.bottom_center.x + c * lx + s * lz,
                self.bottom_center.z - s * lx + c * lz,
            );
        }
        out
    }

    /// `[x_min, z_min, x_max, z_max]` when the yaw is exactly 0, ±π/2 or -π.
    pub fn axis_aligned_extent(&self) -> Option<[f64; 4]> {
        let (hx, hz) = if self.yaw == 0.0 || self.yaw == -PI {
            (self.length / 2.0, self.width / 2.0)
        } else if self.yaw.abs() == FRAC_PI_2 {
            (self.width / 2.0, self.length / 2.0)
        } else {
            return None;
        };
        let c = self.bottom_center;
        Some([c.x - hx, c.z - hz, c.x + hx, c.z + hz])
    }
}

fn check_dims(op: &'static str, w: f64, h: f64, l: f64) -> Result<()> {
    if w > 0.0 && h > 0.0 && l > 0.0 && w.is_finite() && h.is_finite() && l.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("dimensions must be positive, got W={w}, H={h}, L={l}")))
    }
}

/// Offsets of the eight corners from the bottom center, in the documented order.
pub fn corner_offsets(width: f64, height: f64, length: f64, yaw: f64) -> Result<[Point3; 8]> {
    check_dims("corner_offsets", width, height, length)?;
    let (s, c) = yaw.sin_cos();
    let sign = |bit: usize| if bit == 0 { -1.0 } else { 1.0 };
    let mut out = [Point3::default(); 8];
    for (i, o) in out.iter_mut().enumerate() {
        let lx = sign((i >> 2) & 1) * length / 2.0;
        let dy = if (i >> 1) & 1 == 0 { -height } else { 0.0 };
        let lz = sign(i & 1) * width / 2.0;
        *o = Point3::new(c * lx + s * lz, dy, -s * lx + c * lz);
    }
    Ok(out)
}

/// Corners of a box in the camera frame together with their offsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerSet {
    pub corners: [Point3; 8],
    pub offsets: [Point3; 8],
}

impl CornerSet {
    pub fn centroid(&self) -> Point3 {
        let s = self.corners.iter().fold(Point3::default(), |a, &b| a + b);
        Point3::new(s.x / 8.0, s.y / 8.0, s.z / 8.0)
    }
}

pub fn corners_camera(b: &Box3D) -> CornerSet {
    // Box3D construction already validated the dimensions
    let offsets = corner_offsets(b.width, b.height, b.length, b.yaw).expect("validated box");
    let corners = offsets.map(|o| b.bottom_center + o);
    CornerSet { corners, offsets }
}

/// Largest depth offset of any corner from the bottom center.
pub fn delta_z_max(width: f64, length: f64, yaw: f64) -> f64 {
    0.5 * (length * yaw.sin()).abs() + 0.5 * (width * yaw.cos()).abs()
}

/// Whether a 2D box was drawn by an annotator or derived from a 3D box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxKind {
    Annotated,
    Projected,
}

/// Axis-aligned pixel rectangle stored as center and size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box2D {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub h: f64,
    pub kind: BoxKind,
}

impl Box2D {
    pub fn from_ltrb(left: f64, top: f64, right: f64, bottom: f64, kind: BoxKind) -> Self {
        Self {
            u: 0.5 * (left + right),
            v: 0.5 * (top + bottom),
            w: (right - left).max(0.0),
            h: (bottom - top).max(0.0),
            kind,
        }
    }

    pub fn ltrb(&self) -> [f64; 4] {
        [
            self.u - 0.5 * self.w,
            self.v - 0.5 * self.h,
            self.u + 0.5 * self.w,
            self.v + 0.5 * self.h,
        ]
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// Tight pixel rectangle around the eight projected corners.
///
/// Fails if any corner is behind the camera; no clipping is attempted.
pub fn project_box(b: &Box3D, cam: &CalibratedCamera) -> Result<Box2D> {
    let cs = corners_camera(b);
    let (mut u0, mut v0, mut u1, mut v1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in cs.corners {
        let px = project_point(c, cam).map_err(|_| {
            Error::domain(
                "project_box",
                format!("corner ({:.3}, {:.3}, {:.3}) is behind the camera", c.x, c.y, c.z),
            )
        })?;
        u0 = u0.min(px.u);
        u1 = u1.max(px.u);
        v0 = v0.min(px.v);
        v1 = v1.max(px.v);
    }
    Ok(Box2D::from_ltrb(u0, v0, u1, v1, BoxKind::Projected))
}

/// Closed-form projected height pairing the bottom face with the nearest
/// depth `z - Δz_max` and the top face with the farthest `z + Δz_max`.
///
/// Equal to the corner-based height whenever those two corners are the
/// extreme rows, which holds for boxes resting below the camera (`y > H`)
/// with a translation-free camera.
pub fn projected_height_closed_form(b: &Box3D, f_v: f64) -> Result<f64> {
    let dz = delta_z_max(b.width, b.length, b.yaw);
    let Point3 { y, z, .. } = b.bottom_center;
    if z <= dz {
        return Err(Error::domain(
            "projected_height_closed_form",
            format!("z = {z} does not exceed Δz_max = {dz}"),
        ));
    }
    Ok(f_v * y / (z - dz) - f_v * (y - b.height) / (z + dz))
}

/// Observation angle from yaw and the bottom-center position.
pub fn alpha_from_ry(ry: f64, x: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain("alpha_from_ry", format!("z must be positive, got {z}")));
    }
    Ok(normalize_angle(ry - x.atan2(z)))
}

/// Inverse of [`alpha_from_ry`].
pub fn ry_from_alpha(alpha: f64, x: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain("ry_from_alpha", format!("z must be positive, got {z}")));
    }
    Ok(normalize_angle(alpha + x.atan2(z)))
}

/// All angles describing a box as seen from the camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub ry: f64,
    /// Azimuth of the ray to the bottom center in the x–z plane.
    pub theta: f64,
    pub alpha: f64,
    /// Elevation of the ray to the bottom center.
    pub beta: f64,
}

pub fn angle_set(b: &Box3D, cam: &CalibratedCamera) -> Result<AngleSet> {
    let Point3 { x, z, .. } = b.bottom_center;
    let px = project_point(b.bottom_center, cam)?;
    Ok(AngleSet {
        ry: b.yaw,
        theta: x.atan2(z),
        alpha: alpha_from_ry(b.yaw, x, z)?,
        beta: beta_from_pixel(px.v, cam),
    })
}
