//! Dataset and synthetic studies built on the geometry and depth modules.

pub mod misalign;
pub mod spread;
pub mod sweep;
pub mod synth;

pub use misalign::{misalignment_report, misalignment_table, MisalignmentConfig, MisalignmentRow, DEFAULT_DEPTH_BUCKETS};
pub use spread::{depth_spread_table, spread_from_samples, spread_samples, DepthSpreadTable, HeightSource, SpreadCell, SpreadConfig};
pub use sweep::{linspace, sensitivity_sweep, SweepCell, SweepConfig, SweepResult};
pub use synth::{fully_visible, generate_scenes, label_for_box, DimSampler, SyntheticSceneSpec};
