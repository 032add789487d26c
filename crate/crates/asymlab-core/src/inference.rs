//! Cross-fitted estimation of the directional asymmetry coefficient
//! `C_{X→Y} = H(X) − H(Y)`, its asymptotic variance, confidence intervals,
//! and one-sided direction decisions.
//!
//! The sample is split into two equal halves; each half's densities are
//! evaluated on the other half ("cross-fitting"), the two resulting entropy
//! estimates are averaged, and the covariance blocks are per-split second
//! moments of the centered negative log-densities, averaged across splits.

use crate::error::{Error, Result};
#[allow(unused_imports)] // inherent f64 methods cover this under std
use crate::float::FloatExt;
use crate::sce::{evaluate_density, fit_density, DensityConfig};
use crate::stats::{mean, normal_quantile};
use alloc::format;
use alloc::vec::Vec;

/// Paired observations of the putative cause and effect.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Number of retained pairs (even).
    pub n_total: usize,
    /// True when an odd trailing pair was dropped to even the sample.
    pub truncated: bool,
}

impl PairedSample {
    /// Validate and build a paired sample. An odd final pair is dropped
    /// (recorded in `truncated`); fewer than 8 pairs is an error.
    pub fn new(mut x: Vec<f64>, mut y: Vec<f64>) -> Result<PairedSample> {
        if x.len() != y.len() {
            return Err(Error::InvalidSample(format!(
                "paired lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSample("non-finite paired value".into()));
        }
        let truncated = x.len() % 2 == 1;
        if truncated {
            x.pop();
            y.pop();
        }
        if x.len() < 8 {
            return Err(Error::InsufficientSample { got: x.len(), need: 8 });
        }
        let n_total = x.len();
        Ok(PairedSample { x, y, n_total, truncated })
    }
}

/// Deterministic equal split: first half → 𝒟₁, second half → 𝒟₂. Callers
/// shuffle upstream (with a seed) if order could be informative.
pub fn split(sample: &PairedSample) -> (PairedSample, PairedSample) {
    let half = sample.n_total / 2;
    let mk = |x: &[f64], y: &[f64]| PairedSample {
        x: x.to_vec(),
        y: y.to_vec(),
        n_total: x.len(),
        truncated: false,
    };
    (
        mk(&sample.x[..half], &sample.y[..half]),
        mk(&sample.x[half..], &sample.y[half..]),
    )
}

/// One split's out-of-fold evaluations: `−ln f̂` of the other split's
/// densities at this split's points, and the resulting entropy estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitEvaluation {
    pub neg_log_x: Vec<f64>,
    pub neg_log_y: Vec<f64>,
    /// Mean of `neg_log_x` (the split's entropy estimate for X).
    pub h_x: f64,
    /// Mean of `neg_log_y`.
    pub h_y: f64,
    /// Evaluations (across both variables) that hit the clipping floor;
    /// each contributes `−ln(clip_floor)` to the entropy sums.
    pub clipped: usize,
}

/// Cross-fitted asymmetry estimate with variance and interval.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossFitResult {
    /// Ĥ(X), averaged over splits.
    pub h_x: f64,
    /// Ĥ(Y), averaged over splits.
    pub h_y: f64,
    /// Ĉ_{X→Y} = Ĥ(X) − Ĥ(Y).
    pub c_hat: f64,
    /// Averaged covariance blocks of (−ln f̂_X, −ln f̂_Y).
    pub sigma11: f64,
    pub sigma22: f64,
    pub sigma12: f64,
    /// σ̂_C² = σ̂₁₁ + σ̂₂₂ − 2σ̂₁₂, floored at 0.
    pub sigma_c_sq: f64,
    /// Fraction of out-of-fold density evaluations that hit the clipping
    /// floor; large values mean the entropies lean on the floor constant.
    pub clipped_fraction: f64,
    /// Two-sided (1 − α) interval Ĉ ± z_{1−α/2}·σ̂_C/√n.
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub alpha: f64,
    /// Per-split size (n_total / 2), the `n` of the asymptotics.
    pub n: usize,
}

/// Hypothesized dynamics of the generative map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Dynamics {
    /// |∇g| < 1 on average: the pathway contracts, C_{X→Y} > 0 expected.
    Contracting,
    /// |∇g| > 1 on average: the pathway expands, C_{X→Y} < 0 expected.
    Expanding,
}

/// Which one-sided test was run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Hypothesis {
    /// H₁: C_{X→Y} > 0 (contracting pathway present).
    ContractingTest,
    /// H₁: C_{X→Y} < 0 (expanding pathway present).
    ExpandingTest,
}

/// Outcome of a one-sided direction test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Decision {
    DirectionSupported,
    DirectionNotSupported,
}

/// A direction decision together with the bound it was based on.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirectionDecision {
    pub hypothesis: Hypothesis,
    pub decision: Decision,
    /// The relevant one-sided (1 − α) confidence limit: lower for the
    /// contracting test, upper for the expanding test.
    pub bound: f64,
    pub alpha: f64,
}

fn evaluate_split(
    fit_on: &PairedSample,
    eval_at: &PairedSample,
    config: &DensityConfig,
) -> Result<SplitEvaluation> {
    let fx = fit_density(&fit_on.x, config)?;
    let fy = fit_density(&fit_on.y, config)?;
    let mut clipped = 0usize;
    let mut neg_logs = |model: &crate::sce::DensityModel, points: &[f64]| -> Vec<f64> {
        evaluate_density(model, points)
            .iter()
            .map(|&f| {
                if f <= model.clip_floor {
                    clipped += 1;
                }
                -f.ln()
            })
            .collect()
    };
    let neg_log_x = neg_logs(&fx, &eval_at.x);
    let neg_log_y = neg_logs(&fy, &eval_at.y);
    let h_x = mean(&neg_log_x);
    let h_y = mean(&neg_log_y);
    Ok(SplitEvaluation { neg_log_x, neg_log_y, h_x, h_y, clipped })
}

/// Averaged covariance blocks `(σ̂₁₁, σ̂₂₂, σ̂₁₂)` of the centered negative
/// log-densities. Each split is centered at its own entropy estimates
/// before squaring; the two splits' blocks are then averaged.
pub fn covariance_blocks(splits: &[SplitEvaluation; 2]) -> (f64, f64, f64) {
    let (mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0);
    for ev in splits {
        let n = ev.neg_log_x.len() as f64;
        let (mut a11, mut a22, mut a12) = (0.0, 0.0, 0.0);
        for (&lx, &ly) in ev.neg_log_x.iter().zip(&ev.neg_log_y) {
            let dx = lx - ev.h_x;
            let dy = ly - ev.h_y;
            a11 += dx * dx;
            a22 += dy * dy;
            a12 += dx * dy;
        }
        s11 += a11 / n;
        s22 += a22 / n;
        s12 += a12 / n;
    }
    (s11 / 2.0, s22 / 2.0, s12 / 2.0)
}

/// Cross-fitted estimate of C_{X→Y} with a two-sided (1 − α) interval.
pub fn cross_fit(sample: &PairedSample, alpha: f64, config: &DensityConfig) -> Result<CrossFitResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let (d1, d2) = split(sample);
    // Ĥ₂ evaluates 𝒟₁-fitted densities on 𝒟₂ and vice versa.
    let ev2 = evaluate_split(&d1, &d2, config)?;
    let ev1 = evaluate_split(&d2, &d1, config)?;
    let h_x = 0.5 * (ev1.h_x + ev2.h_x);
    let h_y = 0.5 * (ev1.h_y + ev2.h_y);
    let c_hat = h_x - h_y;
    let clipped_fraction =
        (ev1.clipped + ev2.clipped) as f64 / (2 * sample.n_total) as f64;
    let (sigma11, sigma22, sigma12) = covariance_blocks(&[ev1, ev2]);
    let sigma_c_sq = (sigma11 + sigma22 - 2.0 * sigma12).max(0.0);
    let n = sample.n_total / 2;
    let half_width = normal_quantile(1.0 - alpha / 2.0) * sigma_c_sq.sqrt() / (n as f64).sqrt();
    Ok(CrossFitResult {
        h_x,
        h_y,
        c_hat,
        sigma11,
        sigma22,
        sigma12,
        sigma_c_sq,
        clipped_fraction,
        ci_lower: c_hat - half_width,
        ci_upper: c_hat + half_width,
        alpha,
        n,
    })
}

/// One-sided direction decision at level α.
///
/// Contracting: the lower (1 − α) limit `L̂ = Ĉ − z_{1−α}·σ̂_C/√n` must
/// exceed 0. Expanding: the upper limit `Û = Ĉ + z_{1−α}·σ̂_C/√n` must fall
/// below 0. Direction is supported exactly when the data significantly
/// contradict symmetry in the hypothesized direction.
pub fn decide_direction(result: &CrossFitResult, dynamics: Dynamics, alpha: f64) -> DirectionDecision {
    let margin = normal_quantile(1.0 - alpha) * result.sigma_c_sq.sqrt() / (result.n as f64).sqrt();
    match dynamics {
        Dynamics::Contracting => {
            let lower = result.c_hat - margin;
            DirectionDecision {
                hypothesis: Hypothesis::ContractingTest,
                decision: if lower > 0.0 {
                    Decision::DirectionSupported
                } else {
                    Decision::DirectionNotSupported
                },
                bound: lower,
                alpha,
            }
        }
        Dynamics::Expanding => {
            let upper = result.c_hat + margin;
            DirectionDecision {
                hypothesis: Hypothesis::ExpandingTest,
                decision: if upper < 0.0 {
                    Decision::DirectionSupported
                } else {
                    Decision::DirectionNotSupported
                },
                bound: upper,
                alpha,
            }
        }
    }
}
