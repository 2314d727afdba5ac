//! Recovers the depth of one box from its projected height with each formula.

use geodepth::camera::{CalibratedCamera, Point3};
use geodepth::depth::{recover_depth, Formula, GeometryObservation, HeightModel};
use geodepth::geometry::Box3D;

fn main() -> geodepth::Result<()> {
    let cam = CalibratedCamera::new(721.5377, 721.5377, 609.5593, 172.854)?;
    let car = Box3D::new(1.63, 1.51, 3.88, Point3::new(2.1, 1.72, 24.0), 0.8)?;
    let obs = GeometryObservation::of_box(&car, &cam)?;
    println!("h = {:.3} px, beta = {:.4} rad, dz = {:.3} m", obs.h, obs.beta, obs.dz);

    for model in [HeightModel::Paired, HeightModel::BottomAnchored] {
        for formula in [Formula::Full, Formula::V1, Formula::V2] {
            let z = recover_depth(&obs, formula, model)?;
            println!("{model:?} {formula:?}: z = {z:.4} (true 24.0)");
        }
    }
    Ok(())
}
