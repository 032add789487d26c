//! Self-consistent density estimation in the frequency domain.
//!
//! The estimator forms the empirical characteristic function (ECF) of the
//! sample on the dual grid of a padded spatial grid, keeps the maximal
//! contiguous symmetric band of "acceptable" frequencies on which the
//! optimal-kernel discriminant is nonnegative, applies the closed-form
//! optimal kernel transform, and synthesizes the density (and its
//! derivative) on the spatial grid with a single FFT.
//!
//! Conventions: frequencies are `t_k = (k − m/2)·Δt` with
//! `Δt = 2π/(spacing·m)`; the synthesis is
//! `f(x_l) = (Δt/2π)·(−1)^l·Re(FFT(a)_l)` for
//! `a_k = κ̂(t_k)·𝒞(t_k)·exp(−i·t_k·origin)`, under which the plain Riemann
//! sum of the raw density equals `κ̂(0)·𝒞(0) = 1` exactly.

use crate::error::{Error, Result};
use crate::fft::fft_in_place;
#[allow(unused_imports)] // inherent f64 methods cover this under std
use crate::float::FloatExt;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Threshold on `n·m` above which density synthesis switches from the
/// direct ECF sum to the binned/FFT fast path.
pub const GRIDDED_ECF_THRESHOLD: usize = 10_000_000;

/// Evenly spaced evaluation grid covering the padded data range.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpatialGrid {
    /// Leftmost grid node.
    pub origin: f64,
    /// Distance between adjacent nodes (> 0).
    pub spacing: f64,
    /// Number of nodes; a power of two, at least 256.
    pub length: usize,
    /// Fraction of the data range added on each side.
    pub pad_fraction: f64,
}

impl SpatialGrid {
    /// Position of node `k`.
    pub fn node(&self, k: usize) -> f64 {
        self.origin + self.spacing * k as f64
    }

    /// Rightmost grid node.
    pub fn right_edge(&self) -> f64 {
        self.node(self.length - 1)
    }

    /// Total covered width `spacing·(length − 1)`.
    pub fn span(&self) -> f64 {
        self.spacing * (self.length - 1) as f64
    }

    /// Spacing of the dual frequency grid, `2π/(spacing·length)`.
    pub fn frequency_spacing(&self) -> f64 {
        2.0 * core::f64::consts::PI / (self.spacing * self.length as f64)
    }

    /// The dual frequency grid `t_k = (k − length/2)·Δt`.
    pub fn frequencies(&self) -> Vec<f64> {
        let dt = self.frequency_spacing();
        let half = (self.length / 2) as isize;
        (0..self.length as isize).map(|k| (k - half) as f64 * dt).collect()
    }
}

/// Clipping floor for the synthesized density.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ClipFloor {
    /// A fixed positive value.
    Absolute(f64),
    /// `factor / span(grid)` — the given fraction of a uniform density
    /// over the evaluation window, so the floor is scale-equivariant.
    RelativeToSpan(f64),
}

impl ClipFloor {
    /// Concrete floor for a grid of the given span.
    pub fn resolve(&self, span: f64) -> f64 {
        match *self {
            ClipFloor::Absolute(v) => v,
            ClipFloor::RelativeToSpan(f) => f / span,
        }
    }
}

/// Full configuration of a density fit.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityConfig {
    /// Grid length (power of two, ≥ 256).
    pub grid_length: usize,
    /// Padding fraction on each side of the data range.
    pub pad_fraction: f64,
    /// Clipping floor policy.
    pub clip: ClipFloor,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig {
            grid_length: 16_384,
            pad_fraction: 0.5,
            clip: ClipFloor::Absolute(1e-12),
        }
    }
}

/// Empirical characteristic function sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EcfTable {
    /// The frequencies `t_k`.
    pub frequencies: Vec<f64>,
    /// `𝒞(t_k) = n⁻¹ Σ_j exp(i·t_k·X_j)`.
    pub values: Vec<Complex64>,
    /// Sample size behind the table.
    pub n: usize,
}

/// Contiguous inclusive index interval `[lo, hi]` on a frequency grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexInterval {
    pub lo: usize,
    pub hi: usize,
}

impl IndexInterval {
    pub fn contains(&self, k: usize) -> bool {
        k >= self.lo && k <= self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false // lo <= hi by construction
    }
}

/// The optimal kernel transform restricted to the acceptable band.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTransform {
    /// `κ̂(t_k)`, zero outside the acceptable band.
    pub values: Vec<f64>,
    /// The acceptable band `A_n` (contiguous, symmetric about t = 0).
    pub acceptable: IndexInterval,
}

/// A synthesized density on a spatial grid, with frequency-domain
/// provenance retained for derivative evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityModel {
    pub grid: SpatialGrid,
    /// Raw synthesis output; may contain small negative lobes.
    pub raw_values: Vec<f64>,
    /// `max(raw, clip_floor)` at every node.
    pub values: Vec<f64>,
    /// The resolved (absolute) clipping floor.
    pub clip_floor: f64,
    /// Number of grid nodes where clipping was applied.
    pub clipped_count: usize,
    /// Trapezoid-rule integral of the clipped values.
    pub integral: f64,
    /// True when `|integral − 1| > 1e-3`; negative ringing mass around
    /// discontinuous targets routinely exceeds that bound, so this is a
    /// recorded warning rather than an error.
    pub integral_warning: bool,
    /// `κ̂(t_k)·𝒞(t_k)·exp(−i·t_k·origin)` — the FFT input, kept so the
    /// spectral derivative can be synthesized on demand.
    pub(crate) spectrum: Vec<Complex64>,
}

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

fn validate_sample(sample: &[f64]) -> Result<()> {
    if sample.len() < 4 {
        return Err(Error::InsufficientSample { got: sample.len(), need: 4 });
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSample("non-finite sample value".into()));
    }
    Ok(())
}

/// Build the padded evaluation grid for a sample.
pub fn build_grid(sample: &[f64], length: usize, pad_fraction: f64) -> Result<SpatialGrid> {
    if !length.is_power_of_two() || length < 256 {
        return Err(Error::InvalidConfig(format!(
            "grid length must be a power of two >= 256, got {length}"
        )));
    }
    if !(pad_fraction >= 0.0) || !pad_fraction.is_finite() {
        return Err(Error::InvalidConfig(format!("pad fraction must be finite and >= 0, got {pad_fraction}")));
    }
    if sample.len() < 2 {
        return Err(Error::InsufficientSample { got: sample.len(), need: 2 });
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSample("non-finite sample value".into()));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in sample {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi <= lo {
        return Err(Error::ZeroDataRange);
    }
    let range = hi - lo;
    let origin = lo - pad_fraction * range;
    let right = hi + pad_fraction * range;
    Ok(SpatialGrid {
        origin,
        spacing: (right - origin) / (length - 1) as f64,
        length,
        pad_fraction,
    })
}

/// Direct-sum ECF at arbitrary frequencies: `𝒞(t) = n⁻¹ Σ exp(i·t·X_j)`.
pub fn ecf(sample: &[f64], frequencies: &[f64]) -> Result<EcfTable> {
    if sample.is_empty() {
        return Err(Error::InsufficientSample { got: 0, need: 1 });
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSample("non-finite sample value".into()));
    }
    let n = sample.len() as f64;
    let values = frequencies
        .iter()
        .map(|&t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &x in sample {
                acc += cis(t * x);
            }
            acc / n
        })
        .collect();
    Ok(EcfTable { frequencies: frequencies.to_vec(), values, n: sample.len() })
}

/// Exact ECF on a grid's dual frequencies via a per-sample complex
/// recurrence over the nonnegative half-spectrum (conjugate symmetry fills
/// the rest). The rotator is resynchronized from scratch every 256 steps,
/// keeping accumulated rounding at the 1e-13 level.
pub fn ecf_direct_on_grid(sample: &[f64], grid: &SpatialGrid) -> Result<EcfTable> {
    validate_sample(sample)?;
    let m = grid.length;
    let half = m / 2;
    let dt = grid.frequency_spacing();
    let mut pos = vec![Complex64::new(0.0, 0.0); half + 1];
    for &x in sample {
        let base = dt * x;
        let w = cis(base);
        let mut cur = Complex64::new(1.0, 0.0);
        pos[0] += cur;
        for (k, slot) in pos.iter_mut().enumerate().skip(1) {
            if k % 256 == 0 {
                cur = cis(base * k as f64);
            } else {
                cur *= w;
            }
            *slot += cur;
        }
    }
    let n = sample.len() as f64;
    for v in pos.iter_mut() {
        *v /= n;
    }
    Ok(assemble_table(grid, pos, sample.len()))
}

/// Binned/FFT ECF fast path. Samples are snapped to the nearest grid node
/// and counted; a single FFT then yields the ECF of the snapped sample at
/// every dual frequency.
pub fn ecf_gridded(sample: &[f64], grid: &SpatialGrid) -> Result<EcfTable> {
    validate_sample(sample)?;
    let m = grid.length;
    let mut counts = vec![0.0f64; m];
    for &x in sample {
        let pos = (x - grid.origin) / grid.spacing;
        let idx = (pos.round().max(0.0) as usize).min(m - 1);
        counts[idx] += 1.0;
    }
    // FFT of counts with alternating signs shifts the frequency origin to
    // the center of the dual grid; conjugation flips the transform sign to
    // match exp(+i t x).
    let mut buf: Vec<Complex64> = counts
        .iter()
        .enumerate()
        .map(|(l, &c)| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(c * sign, 0.0)
        })
        .collect();
    fft_in_place(&mut buf);
    let n = sample.len() as f64;
    let half = m / 2;
    let dt = grid.frequency_spacing();
    let mut pos = vec![Complex64::new(0.0, 0.0); half + 1];
    for (j, slot) in pos.iter_mut().enumerate() {
        // Positive frequency j·Δt corresponds to FFT bin m/2 + j.
        let k = half + j;
        let bin = if k < m { buf[k].conj() } else { buf[0] };
        *slot = bin * cis(dt * j as f64 * grid.origin) / n;
    }
    Ok(assemble_table(grid, pos, sample.len()))
}

/// ECF on the grid's dual frequencies, choosing the direct sum unless
/// `n·m` exceeds [`GRIDDED_ECF_THRESHOLD`].
pub fn ecf_on_grid(sample: &[f64], grid: &SpatialGrid) -> Result<EcfTable> {
    if sample.len().saturating_mul(grid.length) > GRIDDED_ECF_THRESHOLD {
        ecf_gridded(sample, grid)
    } else {
        ecf_direct_on_grid(sample, grid)
    }
}

fn assemble_table(grid: &SpatialGrid, pos: Vec<Complex64>, n: usize) -> EcfTable {
    let m = grid.length;
    let half = m / 2;
    let mut values = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..half {
        values[half + j] = pos[j];
        if j > 0 {
            values[half - j] = pos[j].conj();
        }
    }
    // Index 0 carries t = −(m/2)·Δt, the mirror of the half-spectrum top.
    values[0] = pos[half].conj();
    // 𝒞(0) = 1 exactly.
    values[half] = Complex64::new(1.0, 0.0);
    EcfTable { frequencies: grid.frequencies(), values, n }
}

/// The acceptable band `A_n`: the maximal contiguous, zero-containing,
/// symmetric index interval on which `|n·𝒞(t)|² ≥ 4(n−1)`.
pub fn acceptable_frequencies(table: &EcfTable) -> IndexInterval {
    let m = table.values.len();
    let center = m / 2;
    let n = table.n as f64;
    let threshold = 4.0 * (n - 1.0);
    let mut j = 0usize;
    while center + j + 1 < m && center >= j + 1 {
        let right = (n * table.values[center + j + 1].norm()).powi(2);
        let left = (n * table.values[center - j - 1].norm()).powi(2);
        if right >= threshold && left >= threshold {
            j += 1;
        } else {
            break;
        }
    }
    IndexInterval { lo: center - j, hi: center + j }
}

/// The closed-form optimal kernel transform on the acceptable band.
pub fn optimal_kernel_transform(table: &EcfTable, acceptable: IndexInterval) -> Result<KernelTransform> {
    if table.n < 2 {
        return Err(Error::InsufficientSample { got: table.n, need: 2 });
    }
    let m = table.values.len();
    let n = table.n as f64;
    let scale = n / (2.0 * (n - 1.0));
    let threshold = 4.0 * (n - 1.0);
    let mut values = vec![0.0f64; m];
    for k in acceptable.lo..=acceptable.hi {
        let mod2 = (n * table.values[k].norm()).powi(2);
        let disc = (1.0 - threshold / mod2).max(0.0);
        values[k] = scale * (1.0 + disc.sqrt());
    }
    // κ̂(0) = 1 is an algebraic identity of the formula at 𝒞(0) = 1; set it
    // exactly so downstream normalization is exact as well.
    values[m / 2] = 1.0;
    Ok(KernelTransform { values, acceptable })
}

/// Synthesize the spatial density from `κ̂·𝒞` with a single FFT.
pub fn synthesize_density(
    kernel: &KernelTransform,
    table: &EcfTable,
    grid: &SpatialGrid,
    clip: ClipFloor,
) -> Result<DensityModel> {
    let m = grid.length;
    if table.values.len() != m || kernel.values.len() != m {
        return Err(Error::InvalidConfig("kernel/ECF/grid length mismatch".into()));
    }
    let clip_floor = clip.resolve(grid.span());
    if !(clip_floor > 0.0) || !clip_floor.is_finite() {
        return Err(Error::InvalidConfig(format!("clip floor must be positive, got {clip_floor}")));
    }
    let dt = grid.frequency_spacing();
    let spectrum: Vec<Complex64> = (0..m)
        .map(|k| {
            let t = table.frequencies[k];
            kernel.values[k] * table.values[k] * cis(-t * grid.origin)
        })
        .collect();
    let mut buf = spectrum.clone();
    fft_in_place(&mut buf);
    let norm = dt / (2.0 * core::f64::consts::PI);
    let raw_values: Vec<f64> = buf
        .iter()
        .enumerate()
        .map(|(l, v)| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            norm * sign * v.re
        })
        .collect();

    let riemann: f64 = raw_values.iter().sum::<f64>() * grid.spacing;
    if (riemann - 1.0).abs() > 1e-6 {
        return Err(Error::TransformInconsistency { integral: riemann });
    }

    let mut clipped_count = 0usize;
    let values: Vec<f64> = raw_values
        .iter()
        .map(|&v| {
            if v < clip_floor {
                clipped_count += 1;
                clip_floor
            } else {
                v
            }
        })
        .collect();
    let trapezoid: f64 = grid.spacing
        * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[m - 1]));

    Ok(DensityModel {
        grid: grid.clone(),
        raw_values,
        values,
        clip_floor,
        clipped_count,
        integral: trapezoid,
        integral_warning: (trapezoid - 1.0).abs() > 1e-3,
        spectrum,
    })
}

/// Fit a density end to end: grid → ECF → band → kernel → synthesis.
pub fn fit_density(sample: &[f64], config: &DensityConfig) -> Result<DensityModel> {
    let grid = build_grid(sample, config.grid_length, config.pad_fraction)?;
    let table = ecf_on_grid(sample, &grid)?;
    let band = acceptable_frequencies(&table);
    let kernel = optimal_kernel_transform(&table, band)?;
    synthesize_density(&kernel, &table, &grid, config.clip)
}

fn interpolate(grid: &SpatialGrid, values: &[f64], point: f64, outside: f64) -> f64 {
    let pos = (point - grid.origin) / grid.spacing;
    if !(0.0..=(grid.length - 1) as f64).contains(&pos) {
        return outside;
    }
    let i0 = (pos.floor() as usize).min(grid.length - 2);
    let frac = pos - i0 as f64;
    values[i0] * (1.0 - frac) + values[i0 + 1] * frac
}

/// Evaluate the clipped density by linear interpolation; points beyond the
/// grid return the clipping floor.
pub fn evaluate_density(model: &DensityModel, points: &[f64]) -> Vec<f64> {
    points
        .iter()
        .map(|&p| interpolate(&model.grid, &model.values, p, model.clip_floor).max(model.clip_floor))
        .collect()
}

/// Density derivative on the grid nodes, synthesized from the retained
/// spectrum: under the `exp(−i·t·x)` synthesis convention, differentiation
/// multiplies the spectrum by `(−i·t)`.
pub fn density_derivative(model: &DensityModel) -> Vec<f64> {
    let m = model.grid.length;
    let dt = model.grid.frequency_spacing();
    let half = (m / 2) as isize;
    let mut buf: Vec<Complex64> = model
        .spectrum
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let t = (k as isize - half) as f64 * dt;
            Complex64::new(0.0, -t) * s
        })
        .collect();
    fft_in_place(&mut buf);
    let norm = dt / (2.0 * core::f64::consts::PI);
    buf.iter()
        .enumerate()
        .map(|(l, v)| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            norm * sign * v.re
        })
        .collect()
}

/// Evaluate the derivative at arbitrary points (linear interpolation, zero
/// outside the grid).
pub fn evaluate_derivative(model: &DensityModel, derivative: &[f64], points: &[f64]) -> Vec<f64> {
    points
        .iter()
        .map(|&p| interpolate(&model.grid, derivative, p, 0.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::rng_from_seed;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn uniform_sample(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        (0..n).map(|_| rng.random::<f64>()).collect()
    }

    fn normal_sample(seed: u64, n: usize, mu: f64, sd: f64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                mu + sd * z
            })
            .collect()
    }

    #[test]
    fn grid_from_unit_sample() {
        let g = build_grid(&[0.0, 1.0, 0.25, 0.75], 256, 0.5).unwrap();
        assert!((g.origin + 0.5).abs() < 1e-15);
        assert!((g.right_edge() - 1.5).abs() < 1e-12);
        assert!((g.spacing - 2.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_sample_is_an_error() {
        assert_eq!(build_grid(&[5.0, 5.0, 5.0, 5.0], 256, 0.5), Err(Error::ZeroDataRange));
    }

    #[test]
    fn grid_covers_padded_range() {
        let s = normal_sample(7, 1000, 0.0, 1.0);
        let g = build_grid(&s, 1024, 0.5).unwrap();
        let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let range = hi - lo;
        assert!(g.origin <= lo - 0.5 * range + 1e-12);
        assert!(g.right_edge() >= hi + 0.5 * range - 1e-12);
    }

    #[test]
    fn ecf_of_a_point_mass_is_one() {
        let t = ecf(&[0.0], &[-3.0, 0.0, 1.7, 42.0]).unwrap();
        for v in &t.values {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn ecf_of_symmetric_pair_is_cosine() {
        let a = 1.3;
        let freqs: Vec<f64> = (0..20).map(|k| k as f64 * 0.37 - 3.0).collect();
        let t = ecf(&[-a, a], &freqs).unwrap();
        for (v, &f) in t.values.iter().zip(&freqs) {
            assert!((v.re - (a * f).cos()).abs() < 1e-14);
            assert!(v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn recurrence_ecf_matches_brute_force() {
        let s = uniform_sample(3, 200);
        let g = build_grid(&s, 256, 0.5).unwrap();
        let fast = ecf_direct_on_grid(&s, &g).unwrap();
        let freqs = g.frequencies();
        for (k, &t) in freqs.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &x in &s {
                acc += Complex64::new((t * x).cos(), (t * x).sin());
            }
            acc /= s.len() as f64;
            assert!((fast.values[k] - acc).norm() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn gridded_ecf_matches_direct_on_snapped_samples() {
        let g = build_grid(&uniform_sample(5, 500), 1024, 0.5).unwrap();
        // Snap every sample onto a grid node so both paths see identical data.
        let snapped: Vec<f64> = uniform_sample(5, 500)
            .iter()
            .map(|&x| {
                let idx = ((x - g.origin) / g.spacing).round();
                g.origin + idx * g.spacing
            })
            .collect();
        let direct = ecf_direct_on_grid(&snapped, &g).unwrap();
        let gridded = ecf_gridded(&snapped, &g).unwrap();
        for k in 0..g.length {
            assert!(
                (direct.values[k] - gridded.values[k]).norm() < 1e-8,
                "k={k}: {:?} vs {:?}",
                direct.values[k],
                gridded.values[k]
            );
        }
    }

    #[test]
    fn ecf_invariants_hold() {
        let s = normal_sample(11, 400, 2.0, 3.0);
        let g = build_grid(&s, 512, 0.5).unwrap();
        let t = ecf_direct_on_grid(&s, &g).unwrap();
        let m = g.length;
        assert_eq!(t.values[m / 2], Complex64::new(1.0, 0.0));
        for v in &t.values {
            assert!(v.norm() <= 1.0 + 1e-12);
        }
        for j in 1..m / 2 {
            assert!((t.values[m / 2 + j] - t.values[m / 2 - j].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn acceptable_band_contains_center_and_is_symmetric() {
        let s = normal_sample(13, 1000, 0.0, 1.0);
        let g = build_grid(&s, 1024, 0.5).unwrap();
        let t = ecf_direct_on_grid(&s, &g).unwrap();
        let band = acceptable_frequencies(&t);
        let center = g.length / 2;
        assert!(band.contains(center));
        assert_eq!(center - band.lo, band.hi - center);
        assert!(band.len() > 1);
    }

    #[test]
    fn tiny_sample_keeps_only_the_origin() {
        // n = 2: threshold is |𝒞|² >= 1, met only where the cosine is ±1.
        let s = [-0.3, 0.7];
        let freqs: Vec<f64> = (-64..64).map(|k| k as f64 * 0.11).collect();
        let mut t = ecf(&s, &freqs).unwrap();
        t.values[64] = Complex64::new(1.0, 0.0);
        let band = acceptable_frequencies(&t);
        assert_eq!(band, IndexInterval { lo: 64, hi: 64 });
    }

    #[test]
    fn band_halfwidth_grows_with_n() {
        // Assumption on the acceptable set: its volume grows with n.
        let mut widths = [0usize; 2];
        for (i, &n) in [250usize, 1000].iter().enumerate() {
            let mut medians = Vec::new();
            for seed in 0..50 {
                let s = normal_sample(100 + seed, n, 0.0, 1.0);
                let g = build_grid(&s, 1024, 0.5).unwrap();
                let t = ecf_on_grid(&s, &g).unwrap();
                medians.push(acceptable_frequencies(&t).len() as f64);
            }
            widths[i] = crate::stats::percentile_type7(&medians, 0.5) as usize;
        }
        assert!(widths[1] > widths[0], "medians {widths:?}");
    }

    #[test]
    fn kernel_is_one_at_zero_frequency_and_for_unit_modulus() {
        // |𝒞| = 1 everywhere with n = 4 gives κ̂ = (2/3)(1 + 1/2) = 1.
        let freqs: Vec<f64> = (-8..8).map(|k| k as f64).collect();
        let table = EcfTable {
            frequencies: freqs.clone(),
            values: vec![Complex64::new(1.0, 0.0); 16],
            n: 4,
        };
        let band = IndexInterval { lo: 0, hi: 15 };
        let k = optimal_kernel_transform(&table, band).unwrap();
        for v in &k.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert_eq!(k.values[8], 1.0);
    }

    #[test]
    fn kernel_respects_band_and_bounds() {
        let s = normal_sample(17, 500, 0.0, 1.0);
        let g = build_grid(&s, 512, 0.5).unwrap();
        let t = ecf_direct_on_grid(&s, &g).unwrap();
        let band = acceptable_frequencies(&t);
        let k = optimal_kernel_transform(&t, band).unwrap();
        let n = t.n as f64;
        for (i, &v) in k.values.iter().enumerate() {
            if band.contains(i) {
                assert!((0.0..=n / (n - 1.0) + 1e-12).contains(&v));
            } else {
                assert_eq!(v, 0.0);
            }
        }
        assert_eq!(k.values[g.length / 2], 1.0);
    }

    fn fit(sample: &[f64], m: usize, clip: ClipFloor) -> DensityModel {
        fit_density(
            sample,
            &DensityConfig { grid_length: m, pad_fraction: 0.5, clip },
        )
        .unwrap()
    }

    #[test]
    fn raw_density_integrates_to_one() {
        for seed in [1u64, 2, 3] {
            let s = normal_sample(seed, 700, -1.0, 2.0);
            let model = fit(&s, 1024, ClipFloor::Absolute(1e-12));
            let riemann: f64 = model.raw_values.iter().sum::<f64>() * model.grid.spacing;
            assert!((riemann - 1.0).abs() < 1e-9, "riemann {riemann}");
        }
    }

    #[test]
    fn uniform_density_is_flat_inside_the_support() {
        let s = uniform_sample(42, 2000);
        let model = fit(&s, 16_384, ClipFloor::Absolute(1e-12));
        let pts: Vec<f64> = (0..=160).map(|i| 0.1 + 0.8 * i as f64 / 160.0).collect();
        let vals = evaluate_density(&model, &pts);
        let mad = vals.iter().map(|v| (v - 1.0).abs()).sum::<f64>() / vals.len() as f64;
        // Boundary ringing of the band-limited estimator floors the MAD
        // near 0.11 for discontinuous targets (see the project notes); the
        // flatness bound reflects observed behavior.
        assert!(mad <= 0.15, "MAD {mad}");
        // Clipping adds back the negative ringing mass outside the support,
        // so the clipped integral carries a warning, not an error.
        assert!(model.integral > 1.0 && model.integral < 1.08);
    }

    #[test]
    fn gaussian_density_is_pointwise_accurate() {
        let s = normal_sample(42, 2000, 0.0, 1.0);
        let model = fit(&s, 16_384, ClipFloor::Absolute(1e-12));
        let pts: Vec<f64> = (0..=80).map(|i| -2.0 + 4.0 * i as f64 / 80.0).collect();
        let vals = evaluate_density(&model, &pts);
        let norm = 1.0 / (2.0 * core::f64::consts::PI).sqrt();
        for (&p, &v) in pts.iter().zip(&vals) {
            let truth = norm * (-p * p / 2.0).exp();
            assert!((v - truth).abs() <= 0.05, "at {p}: {v} vs {truth}");
        }
    }

    #[test]
    fn evaluation_follows_the_interpolation_contract() {
        let s = normal_sample(19, 500, 0.0, 1.0);
        let model = fit(&s, 512, ClipFloor::Absolute(1e-12));
        let g = &model.grid;
        // Exactly at a node.
        let at_node = evaluate_density(&model, &[g.node(100)])[0];
        assert_eq!(at_node, model.values[100]);
        // At a midpoint.
        let mid = 0.5 * (g.node(100) + g.node(101));
        let at_mid = evaluate_density(&model, &[mid])[0];
        assert!((at_mid - 0.5 * (model.values[100] + model.values[101])).abs() < 1e-12);
        // Beyond the grid.
        let outside = evaluate_density(&model, &[g.right_edge() + 1.0, g.origin - 1.0]);
        assert_eq!(outside, vec![model.clip_floor, model.clip_floor]);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let s = normal_sample(23, 2000, 0.0, 1.0);
        let model = fit(&s, 4096, ClipFloor::Absolute(1e-12));
        let d = density_derivative(&model);
        let h = model.grid.spacing;
        let max_d = d.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        for l in 1..model.grid.length - 1 {
            let fd = (model.raw_values[l + 1] - model.raw_values[l - 1]) / (2.0 * h);
            assert!((d[l] - fd).abs() <= 1e-3 * max_d, "node {l}: {} vs {fd}", d[l]);
        }
    }

    #[test]
    fn gaussian_derivative_vanishes_at_the_mode() {
        let s = normal_sample(29, 5000, 0.0, 1.0);
        let model = fit(&s, 4096, ClipFloor::Absolute(1e-12));
        let d = density_derivative(&model);
        let at_zero = evaluate_derivative(&model, &d, &[0.0])[0];
        assert!(at_zero.abs() <= 0.02, "f'(0) = {at_zero}");
    }

    #[test]
    fn derivative_of_symmetric_data_is_odd() {
        // An exactly symmetric sample has a symmetric density, so the
        // derivative is odd about the center up to grid rounding.
        let mut s = Vec::new();
        for k in 1..=50 {
            let v = k as f64 / 50.0;
            s.push(v);
            s.push(-v);
        }
        let model = fit(&s, 512, ClipFloor::Absolute(1e-12));
        let d = density_derivative(&model);
        let m = model.grid.length;
        let max_d = d.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        for j in 0..m / 2 {
            // Nodes j and m-1-j are mirror images about the center.
            assert!((d[j] + d[m - 1 - j]).abs() < 1e-6 * max_d.max(1.0), "j={j}");
        }
    }

    #[test]
    fn mise_proxy_decreases_with_sample_size() {
        let norm = 1.0 / (2.0 * core::f64::consts::PI).sqrt();
        let mut medians = Vec::new();
        for &n in &[250usize, 2000] {
            let mut vals = Vec::new();
            for seed in 0..30 {
                let s = normal_sample(7000 + seed, n, 0.0, 1.0);
                let model = fit(&s, 4096, ClipFloor::Absolute(1e-12));
                let g = &model.grid;
                let ise: f64 = (0..g.length)
                    .map(|l| {
                        let x = g.node(l);
                        let t = norm * (-x * x / 2.0).exp();
                        (model.raw_values[l] - t).powi(2)
                    })
                    .sum::<f64>()
                    * g.spacing;
                vals.push(ise);
            }
            medians.push(crate::stats::percentile_type7(&vals, 0.5));
        }
        assert!(medians[1] < medians[0], "medians {medians:?}");
    }

    #[test]
    fn affine_equivariance_of_the_fit() {
        let s = normal_sample(31, 2000, 0.0, 1.0);
        let (a, b) = (2.5, -1.0);
        let t: Vec<f64> = s.iter().map(|&x| a * x + b).collect();
        let mx = fit(&s, 4096, ClipFloor::Absolute(1e-12));
        let my = fit(&t, 4096, ClipFloor::Absolute(1e-12));
        for &x in &[-1.5, -0.5, 0.0, 0.5, 1.5] {
            let fx = evaluate_density(&mx, &[x])[0];
            let fy = evaluate_density(&my, &[a * x + b])[0];
            assert!((fy - fx / a).abs() <= 0.05, "x={x}: {fy} vs {}", fx / a);
        }
    }

    #[test]
    fn relative_clip_floor_resolves_against_the_span() {
        let s = uniform_sample(1, 500);
        let model = fit(&s, 1024, ClipFloor::RelativeToSpan(1e-2));
        assert!((model.clip_floor - 1e-2 / model.grid.span()).abs() < 1e-15);
    }
}
