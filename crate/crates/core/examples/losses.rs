//! Loss values and gradients for a few predictions.

use geodepth::losses::{focal_variant, optimal_sigma, uncertainty_l1, FocalConfig, UncertainDepthPrediction};

fn main() -> geodepth::Result<()> {
    let cfg = FocalConfig::default();
    for (p, y) in [(0.9, 1.0), (0.2, 1.0), (0.2, 0.8), (0.6, 0.0)] {
        let l = focal_variant(p, y, &cfg)?;
        println!("focal p={p} y={y}: {:.4} (d/dp {:.4})", l.value, l.grad[0]);
    }

    let residual = 1.5;
    let best = optimal_sigma(residual);
    for sigma in [0.5, best, 4.0] {
        let l = uncertainty_l1(&UncertainDepthPrediction { depth: 20.0, sigma }, 20.0 + residual)?;
        println!("sigma {sigma:.3}: loss {:.4}, grad {:?}", l.value, l.grad);
    }
    Ok(())
}
