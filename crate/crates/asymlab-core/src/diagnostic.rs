//! Noise-tolerance diagnostic: fit `ĝ` by linear-spline least squares,
//! compare the residual variance σ̂ against the critical variance
//! `σ̂_CRIT = (exp(2Ĉ) − 1)/Î(Ŷ)`, and bootstrap a percentile interval for
//! the difference. An interval below zero warns that noise contamination
//! exceeds what the entropy-based direction test tolerates.
//!
//! The comparison substitutes the residual variance for the (inestimable)
//! theoretical noise level, as the source construction does; it is a
//! heuristic screen, not a formal test.

use crate::error::{Error, Result};
use crate::experiments::STUDY_DENSITY_CONFIG;
#[allow(unused_imports)] // inherent f64 methods cover this under std
use crate::float::FloatExt;
use crate::entropy::fisher_information;
use crate::inference::{cross_fit, PairedSample};
use crate::sce::{fit_density, ClipFloor, DensityConfig};
use crate::stats::{derive_seed, percentile_type7, rng_from_seed};
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

/// Least-squares linear-spline fit on the truncated-linear basis
/// `{1, x, (x − κ_j)_+}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplineFit {
    /// Interior knots actually used (deduplicated, strictly inside the
    /// data range).
    pub knots: Vec<f64>,
    /// Coefficients ordered as [intercept, slope, knot terms...].
    pub coefficients: Vec<f64>,
    /// Fitted values at the input points.
    pub fitted: Vec<f64>,
    /// `Σ residual² / (n − K − 2)` with K the requested knot count.
    pub residual_variance: f64,
    /// Requested knots that were dropped as duplicates or boundary-degenerate.
    pub knots_dropped: usize,
}

/// Diagnostic report comparing σ̂ and σ̂_CRIT.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiagnosticReport {
    /// Residual variance of the spline fit (noise proxy).
    pub sigma_hat: f64,
    /// `(exp(2Ĉ) − 1)/Î(Ŷ)` from the full sample.
    pub sigma_crit_hat: f64,
    /// Bootstrap 95% percentile interval for σ̂_CRIT − σ̂.
    pub diff_ci_lower: f64,
    pub diff_ci_upper: f64,
    pub bootstrap_replicates: usize,
    /// Interior knot count the spline used (results are sensitive to it).
    pub knots: usize,
}

/// Householder-QR least squares; `design` is row-major n×p.
/// Returns the coefficient vector.
fn qr_least_squares(design: &[f64], rhs: &[f64], n: usize, p: usize) -> Result<Vec<f64>> {
    let mut a = design.to_vec();
    let mut b = rhs.to_vec();
    let at = |a: &[f64], i: usize, j: usize| a[i * p + j];

    let mut max_norm = 0.0f64;
    for j in 0..p {
        let norm: f64 = (0..n).map(|i| at(&a, i, j) * at(&a, i, j)).sum::<f64>().sqrt();
        max_norm = max_norm.max(norm);
    }

    for j in 0..p {
        let norm: f64 = (j..n).map(|i| at(&a, i, j) * at(&a, i, j)).sum::<f64>().sqrt();
        if norm <= 1e-10 * max_norm {
            return Err(Error::RankDeficientDesign);
        }
        let alpha = if at(&a, j, j) > 0.0 { -norm } else { norm };
        let mut v = vec![0.0f64; n - j];
        v[0] = at(&a, j, j) - alpha;
        for i in j + 1..n {
            v[i - j] = at(&a, i, j);
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv > 0.0 {
            for k in j..p {
                let dot: f64 = (j..n).map(|i| v[i - j] * at(&a, i, k)).sum();
                let scale = 2.0 * dot / vtv;
                for i in j..n {
                    a[i * p + k] -= scale * v[i - j];
                }
            }
            let dot: f64 = (j..n).map(|i| v[i - j] * b[i]).sum();
            let scale = 2.0 * dot / vtv;
            for i in j..n {
                b[i] -= scale * v[i - j];
            }
        }
        a[j * p + j] = alpha;
    }

    // Back-substitution on the upper-triangular factor.
    let mut coef = vec![0.0f64; p];
    for j in (0..p).rev() {
        let mut acc = b[j];
        for k in j + 1..p {
            acc -= at(&a, j, k) * coef[k];
        }
        coef[j] = acc / at(&a, j, j);
    }
    Ok(coef)
}

/// Interior knots at equispaced type-7 quantiles of `x`, deduplicated and
/// restricted to the open data range (a knot at or beyond the range spans a
/// zero or collinear basis column).
fn quantile_knots(x: &[f64], k: usize) -> (Vec<f64>, usize) {
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut knots = Vec::with_capacity(k);
    for j in 1..=k {
        let q = percentile_type7(x, j as f64 / (k + 1) as f64);
        if q > lo && q < hi && knots.last().map_or(true, |&last| q > last) {
            knots.push(q);
        }
    }
    let dropped = k - knots.len();
    (knots, dropped)
}

/// Least-squares fit of `y` on the linear-spline basis of `x` with `k`
/// interior knots at equispaced quantiles.
pub fn spline_fit(x: &[f64], y: &[f64], k: usize) -> Result<SplineFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InvalidSample("x and y lengths differ".into()));
    }
    if n < k + 4 {
        return Err(Error::InsufficientSample { got: n, need: k + 4 });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidSample("non-finite value in spline input".into()));
    }
    let (knots, knots_dropped) = quantile_knots(x, k);
    let p = knots.len() + 2;
    let mut design = vec![0.0f64; n * p];
    for (i, &xi) in x.iter().enumerate() {
        design[i * p] = 1.0;
        design[i * p + 1] = xi;
        for (j, &kj) in knots.iter().enumerate() {
            design[i * p + 2 + j] = (xi - kj).max(0.0);
        }
    }
    let coefficients = qr_least_squares(&design, y, n, p)?;
    let fitted: Vec<f64> = (0..n)
        .map(|i| (0..p).map(|j| design[i * p + j] * coefficients[j]).sum())
        .collect();
    let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    let dof = n.saturating_sub(k + 2).max(1) as f64;
    Ok(SplineFit {
        knots,
        coefficients,
        fitted,
        residual_variance: rss / dof,
        knots_dropped,
    })
}

/// Critical noise variance `(exp(2Ĉ) − 1)/Î`; negative when Ĉ < 0.
pub fn sigma_crit(c_hat: f64, fisher_hat: f64) -> Result<f64> {
    if !(fisher_hat > 0.0) {
        return Err(Error::NonPositiveFisher(fisher_hat));
    }
    Ok((2.0 * c_hat).exp_m1() / fisher_hat)
}

/// Density configuration for the Fisher-information fit: a span-relative
/// clip floor inflates the excluded-region cutoff with the data range and
/// biases the score ratio, so the Fisher estimate uses a fixed tiny floor.
const FISHER_DENSITY_CONFIG: DensityConfig = DensityConfig {
    grid_length: 4096,
    pad_fraction: 0.5,
    clip: ClipFloor::Absolute(1e-12),
};

fn diagnostic_point(x: &[f64], y: &[f64], k: usize) -> Result<(f64, f64)> {
    let fit = spline_fit(x, y, k)?;
    let sigma_hat = fit.residual_variance;
    // Ĉ of the denoised pathway: cross-fit X against the fitted Ŷ.
    let pair = PairedSample::new(x.to_vec(), fit.fitted.clone())?;
    let c_hat = cross_fit(&pair, 0.05, &STUDY_DENSITY_CONFIG)?.c_hat;
    let model = fit_density(&fit.fitted, &FISHER_DENSITY_CONFIG)?;
    let fisher = fisher_information(&model, &fit.fitted);
    let crit = sigma_crit(c_hat, fisher.value)?;
    Ok((sigma_hat, crit))
}

/// Full diagnostic: point estimates from the whole sample, then `b`
/// pair-resampled bootstrap replicates of σ̂_CRIT − σ̂ and their 95%
/// percentile interval. Deterministic given the seed.
pub fn bootstrap_diagnostic(
    sample: &PairedSample,
    k: usize,
    b: usize,
    seed: u64,
) -> Result<DiagnosticReport> {
    if b < 200 {
        return Err(Error::InvalidConfig(alloc::format!(
            "bootstrap needs at least 200 replicates, got {b}"
        )));
    }
    let (sigma_hat, sigma_crit_hat) = diagnostic_point(&sample.x, &sample.y, k)?;
    let n = sample.n_total;
    let mut diffs = Vec::with_capacity(b);
    for r in 0..b {
        let mut rng = rng_from_seed(derive_seed(seed, r as u64));
        let mut xb = Vec::with_capacity(n);
        let mut yb = Vec::with_capacity(n);
        for _ in 0..n {
            let i = rng.random_range(0..n);
            xb.push(sample.x[i]);
            yb.push(sample.y[i]);
        }
        let (s, c) = diagnostic_point(&xb, &yb, k)?;
        diffs.push(c - s);
    }
    Ok(DiagnosticReport {
        sigma_hat,
        sigma_crit_hat,
        diff_ci_lower: percentile_type7(&diffs, 0.025),
        diff_ci_upper: percentile_type7(&diffs, 0.975),
        bootstrap_replicates: b,
        knots: k,
    })
}
