//! Depth spread of synthetic cars sharing a 2D height and a 3D height.

use geodepth::analysis::{depth_spread_table, generate_scenes, SpreadConfig, SyntheticSceneSpec};
use geodepth::report::Precision;

fn main() -> geodepth::Result<()> {
    let frames = generate_scenes(&SyntheticSceneSpec { boxes_per_frame: 8, ..Default::default() }, 2000)?;
    let cfg = SpreadConfig {
        h_tolerance: 2.0,
        height_tolerance: 0.02,
        ..Default::default()
    };
    let table = depth_spread_table(&frames, &cfg);
    print!("{}", table.to_table().to_csv(Precision::Sig6));
    Ok(())
}
