//! Seeded synthetic scenes whose labels are exactly self-consistent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::camera::{CalibratedCamera, Point3};
use crate::error::{Error, Result};
use crate::geometry::{alpha_from_ry, corners_camera, normalize_angle, project_box, Box3D};
use crate::kitti::{Frame, FrameCalib, LabelRecord};

/// Consecutive rejected samples tolerated before a spec is deemed infeasible
/// (a rejection rate above 99.9%).
pub const MAX_REJECTIONS: usize = 1000;

/// Corners closer than this to the image plane are rejected.
pub const MIN_CORNER_DEPTH: f64 = 0.5;

/// Normal sampler for box dimensions, clamped to a positive floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimSampler {
    /// `(W, H, L)` means in meters.
    pub mean: [f64; 3],
    /// `(W, H, L)` standard deviations in meters.
    pub spread: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSceneSpec {
    pub seed: u64,
    pub boxes_per_frame: usize,
    pub z_range: (f64, f64),
    pub x_range: (f64, f64),
    /// Bottom-center height below the camera.
    pub y_range: (f64, f64),
    pub yaw_range: (f64, f64),
    pub dims: DimSampler,
    pub camera: CalibratedCamera,
    /// `(width, height)` in pixels.
    pub image_size: (f64, f64),
    pub category: String,
}

impl Default for SyntheticSceneSpec {
    /// Cars on a road seen from a KITTI-like camera.
    fn default() -> Self {
        Self {
            seed: 0,
            boxes_per_frame: 4,
            z_range: (5.0, 60.0),
            x_range: (-12.0, 12.0),
            y_range: (1.55, 1.80),
            yaw_range: (-std::f64::consts::PI, std::f64::consts::PI),
            dims: DimSampler {
                mean: [1.63, 1.53, 3.88],
                spread: [0.10, 0.14, 0.43],
            },
            camera: CalibratedCamera::new(721.5377, 721.5377, 609.5593, 172.854).expect("valid camera"),
            image_size: (1242.0, 375.0),
            category: "Car".into(),
        }
    }
}

impl SyntheticSceneSpec {
    fn validate(&self) -> Result<()> {
        let ranges = [
            ("z_range", self.z_range),
            ("x_range", self.x_range),
            ("y_range", self.y_range),
            ("yaw_range", self.yaw_range),
        ];
        for (name, (lo, hi)) in ranges {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!("{name} is empty: ({lo}, {hi})")));
            }
        }
        if self.dims.mean.iter().any(|m| !(*m > 0.0)) || self.dims.spread.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::Config("dimension means must be positive and spreads non-negative".into()));
        }
        if !(self.image_size.0 > 0.0 && self.image_size.1 > 0.0) {
            return Err(Error::Config("image size must be positive".into()));
        }
        Ok(())
    }
}

fn quantize(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

/// True when every corner is in front of the camera and projects inside the image.
pub fn fully_visible(b: &Box3D, cam: &CalibratedCamera, image_size: (f64, f64)) -> bool {
    if corners_camera(b).corners.iter().any(|c| c.z < MIN_CORNER_DEPTH) {
        return false;
    }
    match project_box(b, cam) {
        Ok(bb) => {
            let [l, t, r, btm] = bb.ltrb();
            l >= 0.0 && t >= 0.0 && r <= image_size.0 && btm <= image_size.1
        }
        Err(_) => false,
    }
}

fn sample_box(spec: &SyntheticSceneSpec, rng: &mut ChaCha8Rng, normals: &[Normal<f64>; 3]) -> Result<Box3D> {
    for _ in 0..MAX_REJECTIONS {
        let [w, h, l] = [0, 1, 2].map(|i| quantize(normals[i].sample(rng).max(0.2 * spec.dims.mean[i])));
        let center = Point3::new(
            quantize(uniform(rng, spec.x_range)),
            quantize(uniform(rng, spec.y_range)),
            quantize(uniform(rng, spec.z_range)),
        );
        let yaw = quantize(normalize_angle(uniform(rng, spec.yaw_range)));
        let Ok(b) = Box3D::new(w, h, l, center, yaw) else { continue };
        if fully_visible(&b, &spec.camera, spec.image_size) {
            return Ok(b);
        }
    }
    Err(Error::Config(format!(
        "scene spec is infeasible: {MAX_REJECTIONS} consecutive samples were not fully visible"
    )))
}

/// Label record whose 2D box and observation angle are derived from `b`.
pub fn label_for_box(category: &str, b: &Box3D, cam: &CalibratedCamera) -> Result<LabelRecord> {
    let bbox = project_box(b, cam)?.ltrb();
    let alpha = alpha_from_ry(b.yaw, b.bottom_center.x, b.bottom_center.z)?;
    Ok(LabelRecord::from_box(category, b, bbox, alpha, None))
}

/// Generates `n_frames` frames. Each frame draws from its own stream of the
/// seeded generator, so output is identical however frames are scheduled.
pub fn generate_scenes(spec: &SyntheticSceneSpec, n_frames: usize) -> Result<Vec<Frame>> {
    spec.validate()?;
    let normals = [0, 1, 2].map(|i| Normal::new(spec.dims.mean[i], spec.dims.spread[i]).expect("validated spread"));
    (0..n_frames)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            let labels = (0..spec.boxes_per_frame)
                .map(|_| {
                    let b = sample_box(spec, &mut rng, &normals)?;
                    label_for_box(&spec.category, &b, &spec.camera)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Frame {
                id: format!("{i:06}"),
                labels,
                calib: FrameCalib::from_camera(spec.camera),
            })
        })
        .collect()
}
