//! Generates a few frames and writes them in the KITTI layout.

use geodepth::analysis::{generate_scenes, SyntheticSceneSpec};
use geodepth::kitti::{serialize_calib, serialize_label_file};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSceneSpec { seed: 42, boxes_per_frame: 3, ..Default::default() };
    let frames = generate_scenes(&spec, 2)?;
    let dir = std::env::temp_dir().join("geodepth-scenes");
    for sub in ["label_2", "calib"] {
        std::fs::create_dir_all(dir.join(sub))?;
    }
    for f in &frames {
        print!("{}:\n{}", f.id, serialize_label_file(&f.labels));
        let name = format!("{}.txt", f.id);
        std::fs::write(dir.join("label_2").join(&name), serialize_label_file(&f.labels))?;
        std::fs::write(dir.join("calib").join(&name), serialize_calib(&f.calib))?;
    }
    println!("wrote {} frames under {}", frames.len(), dir.display());
    Ok(())
}
