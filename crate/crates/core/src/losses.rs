//! Training objectives as scalar functions with analytic partial derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents of the penalty-reduced focal loss used for center heatmaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocalConfig {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for FocalConfig {
    fn default() -> Self {
        Self { alpha: 2.0, beta: 4.0 }
    }
}

impl FocalConfig {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if alpha >= 0.0 && beta >= 0.0 {
            Ok(Self { alpha, beta })
        } else {
            Err(Error::domain("FocalConfig", format!("exponents must be non-negative, got {alpha}, {beta}")))
        }
    }
}

/// A loss value with its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossGrad<const N: usize> {
    pub value: f64,
    pub grad: [f64; N],
}

/// Focal loss of predicted probability `p` against heatmap target `y`.
///
/// `y == 1` is a positive location: `-(1-p)^α·ln p`. Anything else is a
/// negative location down-weighted by its target: `-(1-y)^β·p^α·ln(1-p)`.
/// The gradient is with respect to `p`.
pub fn focal_variant(p: f64, y: f64, cfg: &FocalConfig) -> Result<LossGrad<1>> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::domain("focal_variant", format!("target must lie in [0, 1], got {y}")));
    }
    let FocalConfig { alpha: a, beta: b } = *cfg;
    if y == 1.0 {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain("focal_variant", format!("positive location needs p in (0, 1], got {p}")));
        }
        let q = 1.0 - p;
        let value = -q.powf(a) * p.ln();
        let d_q_pow = if a == 0.0 { 0.0 } else { a * q.powf(a - 1.0) };
        let grad = d_q_pow * p.ln() - q.powf(a) / p;
        Ok(LossGrad { value, grad: [grad] })
    } else {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::domain("focal_variant", format!("negative location needs p in [0, 1), got {p}")));
        }
        let w = (1.0 - y).powf(b);
        let log_q = (-p).ln_1p();
        let value = -w * p.powf(a) * log_q;
        let d_p_pow = if a == 0.0 { 0.0 } else { a * p.powf(a - 1.0) };
        let grad = -w * (d_p_pow * log_q - p.powf(a) / (1.0 - p));
        Ok(LossGrad { value, grad: [grad] })
    }
}

/// Depth prediction with its learned noise scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertainDepthPrediction {
    pub depth: f64,
    pub sigma: f64,
}

/// Laplacian-style uncertainty-weighted L1: `(√2/σ)·|d_gt - d| + ln σ`.
///
/// Gradient order: `[∂/∂depth, ∂/∂sigma]`. At zero residual the depth
/// derivative uses `sign(0) = 0`.
pub fn uncertainty_l1(pred: &UncertainDepthPrediction, d_gt: f64) -> Result<LossGrad<2>> {
    let s = pred.sigma;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::domain("uncertainty_l1", format!("sigma must be positive, got {s}")));
    }
    let e = d_gt - pred.depth;
    let r2 = std::f64::consts::SQRT_2;
    let value = r2 / s * e.abs() + s.ln();
    let sign = if e > 0.0 {
        1.0
    } else if e < 0.0 {
        -1.0
    } else {
        0.0
    };
    Ok(LossGrad {
        value,
        grad: [-r2 * sign / s, -r2 * e.abs() / (s * s) + 1.0 / s],
    })
}

/// The σ minimizing [`uncertainty_l1`] for a fixed residual.
pub fn optimal_sigma(residual: f64) -> f64 {
    std::f64::consts::SQRT_2 * residual.abs()
}

/// Sum of absolute differences.
pub fn l1(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::Input(format!("l1 length mismatch ({} vs {})", pred.len(), target.len())));
    }
    Ok(pred.iter().zip(target).map(|(p, t)| (p - t).abs()).sum())
}

/// The six 2D regression targets of one object.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoxTargets2d {
    pub offset_2d: [f64; 2],
    pub offset_3d: [f64; 2],
    pub size_2d: [f64; 2],
}

impl BoxTargets2d {
    pub fn as_array(&self) -> [f64; 6] {
        let [a, b] = self.offset_2d;
        let [c, d] = self.offset_3d;
        let [e, f] = self.size_2d;
        [a, b, c, d, e, f]
    }
}

pub fn loss_2d(pred: &BoxTargets2d, target: &BoxTargets2d) -> f64 {
    pred.as_array().iter().zip(target.as_array()).map(|(p, t)| (p - t).abs()).sum()
}

/// L1 on the three dimensions plus the uncertainty-weighted depth term.
pub fn loss_3d(dims: [f64; 3], dims_gt: [f64; 3], depth: &UncertainDepthPrediction, depth_gt: f64) -> Result<f64> {
    Ok(l1(&dims, &dims_gt)? + uncertainty_l1(depth, depth_gt)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lambda_2d: f64,
    pub lambda_3d: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_2d: 1.0,
            lambda_3d: 1.0,
        }
    }
}

pub fn total_loss(l_c: f64, l_2d: f64, l_3d: f64, w: &LossWeights) -> f64 {
    l_c + w.lambda_2d * l_2d + w.lambda_3d * l_3d
}
