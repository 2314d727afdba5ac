//! Depth implied by a fixed 30 px, 1.51 m car as pose varies.

use geodepth::analysis::{sensitivity_sweep, SweepConfig};
use geodepth::depth::HeightModel;

fn main() -> geodepth::Result<()> {
    for model in [HeightModel::Paired, HeightModel::BottomAnchored] {
        let r = sensitivity_sweep(&SweepConfig { model, ..SweepConfig::car() })?;
        println!(
            "{model:?}: {} cells, depth {:.2} .. {:.2} m, spread {:.2} m",
            r.cells.len(),
            r.min.unwrap_or(f64::NAN),
            r.max.unwrap_or(f64::NAN),
            r.spread.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
