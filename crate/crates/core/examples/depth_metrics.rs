//! Depth error metrics, overall and per range.

use geodepth::depth_metrics::{bucketed_depth_errors, depth_errors, DepthSample, DEFAULT_RANGES};

fn main() -> geodepth::Result<()> {
    let gt = [6.0, 12.5, 18.0, 27.3, 35.9, 44.1];
    let pred = [6.3, 12.0, 19.1, 25.8, 38.2, 41.0];
    let all = depth_errors(&pred, &gt)?;
    println!(
        "SILog {:.3}  absRel {:.3}  sqRel {:.3}  iRMSE {:.3}",
        all.silog, all.abs_rel, all.sq_rel, all.irmse
    );

    let samples: Vec<DepthSample> = pred
        .iter()
        .zip(gt)
        .map(|(&p, g)| DepthSample { pred: p, gt: g, gt_depth: g })
        .collect();
    for s in bucketed_depth_errors(&samples, &DEFAULT_RANGES)? {
        println!("[{:>2}, {:>2}) n={} absRel {:.3}", s.range.0, s.range.1, s.count, s.abs_rel);
    }
    Ok(())
}
