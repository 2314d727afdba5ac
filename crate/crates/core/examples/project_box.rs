//! Projects a labelled car through the KITTI P2 camera.

use geodepth::camera::{CalibratedCamera, Point3};
use geodepth::geometry::{angle_set, corners_camera, project_box, Box3D};

fn main() -> geodepth::Result<()> {
    let cam = CalibratedCamera::kitti_p2();
    let car = Box3D::new(1.67, 1.65, 3.64, Point3::new(-0.65, 1.71, 46.70), -1.59)?;

    for (i, c) in corners_camera(&car).corners.iter().enumerate() {
        println!("corner {i}: x={:7.3} y={:6.3} z={:7.3}", c.x, c.y, c.z);
    }
    let bb = project_box(&car, &cam)?;
    let [l, t, r, b] = bb.ltrb();
    println!("2D box: ({l:.2}, {t:.2}) - ({r:.2}, {b:.2}), height {:.2} px", bb.h);

    let angles = angle_set(&car, &cam)?;
    println!("{angles:?}");
    Ok(())
}
