//! Command dispatch: a resolved [`RunConfig`] in, a [`Report`] out.

use crate::error::CliError;
use crate::ingest::{ingest_csv, ingest_column, normalize_minmax};
use crate::report::{ConfigEcho, Payload, Report, SCHEMA_VERSION};
use asymlab_core::diagnostic::bootstrap_diagnostic;
use asymlab_core::experiments::{
    accuracy_replicate, case_id_from_label, dynamics_of, summarize_coverage,
    summarize_replication, table1_replicate, table2_replicate,
};
use asymlab_core::gem::NpgemConfig;
use asymlab_core::inference::{cross_fit, decide_direction, Dynamics};
use asymlab_core::sce::{fit_density, ClipFloor, DensityConfig};
use asymlab_core::stats::derive_seed;
use std::path::PathBuf;

/// Default seed when neither `--seed` nor `ASYMLAB_SEED` is given; fixed
/// (not wall-clock) so unseeded runs stay deterministic.
pub const DEFAULT_SEED: u64 = 24601;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Estimate,
    Test,
    Simulate,
    Diagnose,
    Density,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Estimate => "estimate",
            Command::Test => "test",
            Command::Simulate => "simulate",
            Command::Diagnose => "diagnose",
            Command::Density => "density",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeMode {
    None,
    MinMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Fully resolved run configuration (flags, env, and defaults applied).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub x_col: Option<String>,
    pub y_col: Option<String>,
    pub normalize: NormalizeMode,
    pub dynamics: Option<Dynamics>,
    pub alpha: f64,
    pub grid_length: usize,
    pub pad_fraction: f64,
    pub clip_floor: f64,
    pub seed: u64,
    pub replicates: Option<usize>,
    pub bootstrap: usize,
    pub knots: usize,
    pub table: Option<u8>,
    pub case: Option<String>,
    pub g: Option<String>,
    pub sigma: f64,
    pub rho: f64,
    pub n: Option<usize>,
    pub jobs: usize,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Estimate,
            input: None,
            x_col: None,
            y_col: None,
            normalize: NormalizeMode::None,
            dynamics: None,
            alpha: 0.05,
            grid_length: 16_384,
            pad_fraction: 0.5,
            clip_floor: 1e-12,
            seed: DEFAULT_SEED,
            replicates: None,
            bootstrap: 1000,
            knots: 10,
            table: None,
            case: None,
            g: None,
            sigma: 0.0,
            rho: 0.0,
            n: None,
            jobs: 1,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    fn density_config(&self) -> DensityConfig {
        DensityConfig {
            grid_length: self.grid_length,
            pad_fraction: self.pad_fraction,
            clip: ClipFloor::Absolute(self.clip_floor),
        }
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            command: self.command.name().to_string(),
            input: self.input.as_ref().map(|p| p.display().to_string()),
            x_col: self.x_col.clone(),
            y_col: self.y_col.clone(),
            normalize: match self.normalize {
                NormalizeMode::None => "none".into(),
                NormalizeMode::MinMax => "minmax".into(),
            },
            dynamics: self.dynamics.map(|d| {
                match d {
                    Dynamics::Contracting => "contracting",
                    Dynamics::Expanding => "expanding",
                }
                .to_string()
            }),
            alpha: self.alpha,
            grid_length: self.grid_length,
            pad_fraction: self.pad_fraction,
            clip_floor: self.clip_floor,
            seed: self.seed,
            replicates: self.replicates,
            bootstrap: match self.command {
                Command::Diagnose => Some(self.bootstrap),
                _ => None,
            },
            knots: match self.command {
                Command::Diagnose => Some(self.knots),
                _ => None,
            },
            table: self.table,
            case: self.case.clone(),
            g: self.g.clone(),
            sigma: Some(self.sigma),
            rho: Some(self.rho),
            n: self.n,
            jobs: self.jobs,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return Err(CliError::Config(format!("--alpha must lie in (0, 0.5], got {}", self.alpha)));
        }
        if !self.grid_length.is_power_of_two() {
            return Err(CliError::Config(format!(
                "--grid must be a power of two, got {}",
                self.grid_length
            )));
        }
        if !(self.clip_floor > 0.0) {
            return Err(CliError::Config(format!("--clip-floor must be positive, got {}", self.clip_floor)));
        }
        if !(self.pad_fraction >= 0.0) {
            return Err(CliError::Config(format!("--pad must be nonnegative, got {}", self.pad_fraction)));
        }
        if self.jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Run replicates 0..r, possibly across worker threads, and return the
/// results ordered by replicate index (identical to the serial order).
fn run_replicates<T, F>(r: usize, jobs: usize, f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(usize) -> Result<T, CliError> + Sync,
{
    if jobs <= 1 || r <= 1 {
        return (0..r).map(&f).collect();
    }
    let workers = jobs.min(r);
    let mut slots: Vec<Option<Result<T, CliError>>> = (0..r).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunks: Vec<&mut [Option<Result<T, CliError>>]> =
            chunk_strided(&mut slots, workers);
        let f = &f;
        for (w, chunk) in chunks.into_iter().enumerate() {
            scope.spawn(move || {
                for (j, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(f(w + j * workers)); // inverse of the striding below
                }
            });
        }
    });
    // Un-stride back into replicate order.
    let mut ordered: Vec<Option<Result<T, CliError>>> = (0..r).map(|_| None).collect();
    let per_worker = split_sizes(r, workers);
    let mut it = slots.into_iter();
    for (w, &count) in per_worker.iter().enumerate() {
        for j in 0..count {
            ordered[w + j * workers] = it.next().expect("slot count mismatch");
        }
    }
    ordered
        .into_iter()
        .map(|slot| slot.expect("worker left a replicate unfilled"))
        .collect()
}

/// Number of replicates each of `workers` strided workers handles.
fn split_sizes(r: usize, workers: usize) -> Vec<usize> {
    (0..workers).map(|w| (r + workers - 1 - w) / workers).collect()
}

/// Split a slice into per-worker contiguous chunks sized like the strided
/// assignment `worker w handles indices w, w + workers, ...`.
fn chunk_strided<T>(slots: &mut [Option<T>], workers: usize) -> Vec<&mut [Option<T>]> {
    let sizes = split_sizes(slots.len(), workers);
    let mut rest = slots;
    let mut out = Vec::with_capacity(workers);
    for &s in &sizes {
        let (head, tail) = rest.split_at_mut(s);
        out.push(head);
        rest = tail;
    }
    out
}

fn require<'a, T>(value: &'a Option<T>, flag: &str, command: &str) -> Result<&'a T, CliError> {
    value
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("{flag} is required for `{command}`")))
}

fn estimate_payload(
    config: &RunConfig,
    warnings: &mut Vec<String>,
) -> Result<(asymlab_core::inference::CrossFitResult, Option<crate::ingest::NormalizationRecord>), CliError> {
    let input = require(&config.input, "--input", config.command.name())?;
    let ingest = ingest_csv(input, config.x_col.as_deref(), config.y_col.as_deref())?;
    warnings.extend(ingest.warnings);
    let (sample, record) = match config.normalize {
        NormalizeMode::None => (ingest.sample, None),
        NormalizeMode::MinMax => {
            let (s, rec) = normalize_minmax(&ingest.sample)?;
            warnings.push(format!(
                "min-max normalization shifts the asymmetry coefficient by {:+.6}",
                rec.c_shift
            ));
            (s, Some(rec))
        }
    };
    let result = cross_fit(&sample, config.alpha, &config.density_config())?;
    if result.clipped_fraction > 0.01 {
        warnings.push(format!(
            "{:.1}% of entropy evaluations hit the clip floor; estimates lean on the floor constant",
            100.0 * result.clipped_fraction
        ));
    }
    Ok((result, record))
}

fn simulate_payload(config: &RunConfig, warnings: &mut Vec<String>) -> Result<Payload, CliError> {
    let table = *require(&config.table, "--table", "simulate")?;
    let seed = config.seed;
    match table {
        1 => {
            let g = require(&config.g, "--g", "simulate --table 1")?.clone();
            let n = config.n.unwrap_or(1000);
            let r = config.replicates.unwrap_or(250);
            // The published noise levels are standard deviations; the
            // sampler takes a variance.
            let variance = config.sigma * config.sigma;
            let values = run_replicates(r, config.jobs, |i| {
                table1_replicate(&g, variance, n, derive_seed(seed, i as u64)).map_err(CliError::from)
            })?;
            let summary = summarize_replication(&g, values)?;
            if summary.published_sign_conflict {
                warnings.push(
                    "published ensemble table classifies this map opposite to its geometric mean; \
                     analytic coefficient reported alongside"
                        .into(),
                );
            }
            Ok(Payload::Replication(summary))
        }
        2 => {
            let label = require(&config.case, "--case", "simulate --table 2")?;
            let case_id = case_id_from_label(label)?;
            let n = config.n.unwrap_or(500);
            let r = config.replicates.unwrap_or(200);
            let results = run_replicates(r, config.jobs, |i| {
                table2_replicate(case_id, n, derive_seed(seed, i as u64)).map_err(CliError::from)
            })?;
            Ok(Payload::Coverage(summarize_coverage(case_id, n, &results)?))
        }
        3 => {
            let g = require(&config.g, "--g", "simulate --table 3")?.clone();
            let n = config.n.unwrap_or(1000);
            let r = config.replicates.unwrap_or(250);
            let dynamics = dynamics_of(&g)?;
            let npgem = NpgemConfig {
                g_id: g.clone(),
                noise_variance: config.sigma * config.sigma,
                noise_exposure_correlation: config.rho,
                n,
                seed,
            };
            let outcomes = run_replicates(r, config.jobs, |i| {
                accuracy_replicate(&npgem, dynamics, derive_seed(seed, i as u64))
                    .map_err(CliError::from)
            })?;
            let supported = outcomes.iter().filter(|(s, _)| *s).count();
            let sign_ok = outcomes.iter().filter(|(_, g)| *g).count();
            if g == "sin_half_pi" {
                warnings.push(
                    "published accuracy table classifies this map opposite to its geometric mean"
                        .into(),
                );
            }
            Ok(Payload::Accuracy(asymlab_core::experiments::AccuracySummary {
                detection_rate: supported as f64 / r as f64,
                sign_rate: sign_ok as f64 / r as f64,
                config: npgem,
                replicates: r,
            }))
        }
        other => Err(CliError::Config(format!("--table must be 1, 2, or 3, got {other}"))),
    }
}

/// Execute a resolved configuration and assemble the report.
pub fn dispatch(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let mut warnings = Vec::new();
    let payload = match config.command {
        Command::Estimate => {
            let (result, normalization) = estimate_payload(config, &mut warnings)?;
            Payload::Estimate { result, normalization }
        }
        Command::Test => {
            let dynamics = *require(&config.dynamics, "--dynamics", "test")?;
            let (result, normalization) = estimate_payload(config, &mut warnings)?;
            let decision = decide_direction(&result, dynamics, config.alpha);
            Payload::Test { result, decision, normalization }
        }
        Command::Simulate => simulate_payload(config, &mut warnings)?,
        Command::Diagnose => {
            let input = require(&config.input, "--input", "diagnose")?;
            let ingest = ingest_csv(input, config.x_col.as_deref(), config.y_col.as_deref())?;
            warnings.extend(ingest.warnings);
            let report =
                bootstrap_diagnostic(&ingest.sample, config.knots, config.bootstrap, config.seed)?;
            if report.diff_ci_upper < 0.0 {
                warnings.push(
                    "estimated noise exceeds the critical variance; the direction estimate may be unreliable"
                        .into(),
                );
            }
            Payload::Diagnostic(report)
        }
        Command::Density => {
            let input = require(&config.input, "--input", "density")?;
            let (values, ingest_warnings) = ingest_column(input, config.x_col.as_deref())?;
            warnings.extend(ingest_warnings);
            let model = fit_density(&values, &config.density_config())?;
            if model.integral_warning {
                warnings.push(format!(
                    "clipped density integrates to {:.6}; boundary ringing mass was clipped",
                    model.integral
                ));
            }
            let x: Vec<f64> = (0..model.grid.length).map(|k| model.grid.node(k)).collect();
            Payload::Density { x, density: model.values.clone() }
        }
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION.to_string(),
        config: config.echo(),
        payload,
        warnings,
    })
}
