//! Geometry-guided monocular depth toolkit.
//!
//! Camera projection, 3D box geometry, the closed-form depth from a projected
//! 2D box height, KITTI label and calibration I/O, detection and depth
//! evaluation, training-loss primitives, and dataset-level analyses.
//!
//! Conventions: camera frame with x right, y down, z forward; boxes anchored
//! at their bottom center; yaw about the y axis. See `docs/CONVENTIONS.md`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod camera;
pub mod cli;
pub mod depth;
pub mod depth_metrics;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod geometry;
pub mod kitti;
pub mod losses;
pub mod report;

pub use error::{Error, Result};
