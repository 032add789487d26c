//! Plug-in differential entropy and nonparametric Fisher information.
//!
//! Everything is in nats. The plug-in entropy averages `−ln f̂` over the
//! supplied evaluation points; clipping makes every summand finite, and the
//! number of points that hit the floor is surfaced so silent divergence is
//! visible to callers.

use crate::error::{Error, Result};
#[allow(unused_imports)] // inherent f64 methods cover this under std
use crate::float::FloatExt;
use crate::sce::{density_derivative, evaluate_density, evaluate_derivative, DensityModel};
use alloc::vec::Vec;

/// Plug-in entropy value with clipping diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EntropyEstimate {
    /// `−(1/n) Σ ln f̂(point)`, in nats.
    pub value: f64,
    /// Number of evaluation points.
    pub n_eval: usize,
    /// Evaluation points whose density hit the clipping floor; each
    /// contributes `−ln(clip_floor)`.
    pub clipped_eval_count: usize,
}

/// Nonparametric Fisher information estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FisherEstimate {
    /// `(1/n) Σ (f̂′/f̂)²` over the retained points (≥ 0).
    pub value: f64,
    /// Points retained after the low-density exclusion.
    pub n_eval: usize,
}

/// Plug-in differential entropy of `model` over `points`.
pub fn plugin_entropy(model: &DensityModel, points: &[f64]) -> EntropyEstimate {
    assert!(!points.is_empty(), "plugin_entropy requires evaluation points");
    let dens = evaluate_density(model, points);
    let mut acc = 0.0;
    let mut clipped = 0usize;
    for &f in &dens {
        if f <= model.clip_floor {
            clipped += 1;
        }
        acc -= f.ln();
    }
    EntropyEstimate {
        value: acc / points.len() as f64,
        n_eval: points.len(),
        clipped_eval_count: clipped,
    }
}

/// Oracle entropy against a known log-density: `−(1/n) Σ log f(point)`.
pub fn oracle_entropy(log_density: impl Fn(f64) -> f64, points: &[f64]) -> Result<f64> {
    assert!(!points.is_empty(), "oracle_entropy requires evaluation points");
    let mut acc = 0.0;
    for &p in points {
        let l = log_density(p);
        if !l.is_finite() {
            return Err(Error::NonFiniteCallback { at: p });
        }
        acc -= l;
    }
    Ok(acc / points.len() as f64)
}

/// Nonparametric Fisher information `(1/n) Σ (f̂′/f̂)²`.
///
/// Points where `f̂ < 100·clip_floor` are excluded: the score ratio is
/// numerically explosive where the density estimate has no support. The
/// retained count is reported in `n_eval`.
pub fn fisher_information(model: &DensityModel, points: &[f64]) -> FisherEstimate {
    let derivative = density_derivative(model);
    let dens = evaluate_density(model, points);
    let derivs = evaluate_derivative(model, &derivative, points);
    let cutoff = 100.0 * model.clip_floor;
    let mut acc = 0.0;
    let mut kept = 0usize;
    for (&f, &d) in dens.iter().zip(&derivs) {
        if f < cutoff {
            continue;
        }
        let r = d / f;
        acc += r * r;
        kept += 1;
    }
    FisherEstimate {
        value: if kept > 0 { acc / kept as f64 } else { 0.0 },
        n_eval: kept,
    }
}

/// Retained-density evaluations bundled for covariance estimation: the
/// per-point `−ln f̂` values that the cross-fitting layer centers and
/// squares.
pub fn neg_log_density(model: &DensityModel, points: &[f64]) -> Vec<f64> {
    evaluate_density(model, points).iter().map(|&f| -f.ln()).collect()
}
