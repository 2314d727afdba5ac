//! AP of noisy detections against synthetic ground truth, per difficulty.

use geodepth::analysis::{generate_scenes, SyntheticSceneSpec};
use geodepth::eval::ap::{evaluate_ap_frames, Difficulty, EvalConfig, RecallGrid, Task};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> geodepth::Result<()> {
    let frames = generate_scenes(&SyntheticSceneSpec::default(), 50)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pairs: Vec<_> = frames
        .iter()
        .map(|f| {
            let mut dets = Vec::new();
            for g in &f.labels {
                if rng.random::<f64>() < 0.2 {
                    continue;
                }
                let mut d = g.clone();
                d.location[2] += rng.random_range(-1.0..1.0);
                d.bbox = d.bbox.map(|c| c + rng.random_range(-3.0..3.0));
                d.score = Some(rng.random_range(0.1..1.0));
                dets.push(d);
            }
            (dets, f.labels.clone())
        })
        .collect();

    for task in [Task::Detection2d, Task::Bev, Task::Detection3d] {
        for difficulty in Difficulty::ALL {
            let cfg = EvalConfig::new(0.7, RecallGrid::R40, difficulty, task, "Car")?;
            let r = evaluate_ap_frames(&pairs, &cfg)?;
            println!("{:>3} {:<8} AP40 = {:6.2}", task.name(), difficulty.name(), r.ap);
        }
    }
    Ok(())
}
