//! Parses, inspects and re-serializes label and calibration text.

use geodepth::kitti::{parse_calib_file, parse_label_file, serialize_label_file};

const LABELS: &str = "\
Pedestrian 0.00 0 -0.20 712.40 143.00 810.73 307.92 1.89 0.48 1.20 1.84 1.47 8.41 0.01
Car 0.00 0 1.85 387.63 181.54 423.81 203.12 1.67 1.87 3.69 -16.53 2.39 58.49 1.57 0.9312
DontCare -1 -1 -10 503.89 169.71 590.61 190.13 -1 -1 -1 -1000 -1000 -1000 -10
";

const CALIB: &str = "\
P0: 7.215377e+02 0 6.095593e+02 0 0 7.215377e+02 1.728540e+02 0 0 0 1 0
P2: 7.215377e+02 0 6.095593e+02 4.485728e+01 0 7.215377e+02 1.728540e+02 2.163791e-01 0 0 1 2.745884e-03
R0_rect: 1 0 0 0 1 0 0 0 1
";

fn main() -> geodepth::Result<()> {
    let records = parse_label_file(LABELS)?;
    for r in &records {
        println!("{:<10} ignorable={} score={:?}", r.category, r.is_ignorable(), r.score);
    }
    print!("{}", serialize_label_file(&records));

    let calib = parse_calib_file(CALIB)?;
    println!("camera from {}: {:?}", calib.reference, calib.camera);
    println!("keys: {:?}", calib.matrices.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>());
    Ok(())
}
