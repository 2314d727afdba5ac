//! Error of the full, v1 and v2 depth formulas over synthetic cars.

use geodepth::analysis::{generate_scenes, SyntheticSceneSpec};
use geodepth::depth::{compare_formulas, HeightModel};
use geodepth::geometry::Box3D;

fn main() -> geodepth::Result<()> {
    let spec = SyntheticSceneSpec::default();
    let frames = generate_scenes(&spec, 200)?;
    let boxes: Vec<Box3D> = frames
        .iter()
        .flat_map(|f| f.labels.iter().map(|l| l.box3d()))
        .collect::<geodepth::Result<_>>()?;
    let rows = compare_formulas(&boxes, &spec.camera, HeightModel::BottomAnchored);

    let errs: Vec<[f64; 3]> = rows.iter().filter_map(|r| r.rel_errors()).collect();
    let n = errs.len() as f64;
    for (i, name) in ["full", "v1", "v2"].iter().enumerate() {
        let mean = errs.iter().map(|e| e[i]).sum::<f64>() / n;
        let max = errs.iter().map(|e| e[i]).fold(0.0, f64::max);
        println!("{name:>4}: mean rel err {mean:.3e}, max {max:.3e}");
    }
    println!("{} of {} boxes recovered", errs.len(), rows.len());
    Ok(())
}
