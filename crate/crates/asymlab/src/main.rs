use asymlab::dispatch::{dispatch, Command, NormalizeMode, OutputFormat, RunConfig, DEFAULT_SEED};
use asymlab::error::CliError;
use asymlab::report::{density_csv, to_canonical_json, to_csv, Payload};
use asymlab_core::inference::Dynamics;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;

/// Directional-asymmetry analysis: entropy-based quantification of whether
/// a map contracts or expands the distribution it is applied to.
#[derive(Parser)]
#[command(name = "asymlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Estimate the asymmetry coefficient Ĉ = Ĥ(X) − Ĥ(Y) with a CI.
    Estimate(CommonOpts),
    /// One-sided test of a hypothesized dynamics direction.
    Test(CommonOpts),
    /// Monte Carlo study runners (--table 1, 2, or 3).
    Simulate(CommonOpts),
    /// Spline/bootstrap noise diagnostic (σ̂ vs critical variance).
    Diagnose(CommonOpts),
    /// Export the self-consistent density estimate on its grid.
    Density(CommonOpts),
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizeArg {
    None,
    Minmax,
}

#[derive(Clone, Copy, ValueEnum)]
enum DynamicsArg {
    Contracting,
    Expanding,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    /// CSV input file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// X column: 0-based index or header name (default: column 0).
    #[arg(long)]
    x_col: Option<String>,
    /// Y column: 0-based index or header name (default: column 1).
    #[arg(long)]
    y_col: Option<String>,
    /// Affine rescaling applied before estimation.
    #[arg(long, value_enum, default_value = "none")]
    normalize: NormalizeArg,
    /// Hypothesized direction (required for `test`).
    #[arg(long, value_enum)]
    dynamics: Option<DynamicsArg>,
    /// Significance level in (0, 0.5].
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Density grid length (power of two).
    #[arg(long, default_value_t = 16_384)]
    grid: usize,
    /// Fraction of the data range padded on each side of the grid.
    #[arg(long, default_value_t = 0.5)]
    pad: f64,
    /// Absolute density clip floor.
    #[arg(long, default_value_t = 1e-12)]
    clip_floor: f64,
    /// Master RNG seed; falls back to ASYMLAB_SEED, then a fixed default.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo replicates (default depends on --table).
    #[arg(long)]
    replicates: Option<usize>,
    /// Bootstrap replicates for `diagnose` (minimum 200).
    #[arg(long, default_value_t = 1000)]
    bootstrap: usize,
    /// Interior spline knots for `diagnose`.
    #[arg(long, default_value_t = 10)]
    knots: usize,
    /// Worker threads for simulate replicates (summaries are identical for
    /// any value; only the config echo records it).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output format.
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Study table to reproduce (1 = replication, 2 = coverage, 3 =
    /// accuracy).
    #[arg(long)]
    table: Option<u8>,
    /// Coverage case label ("i" or "ii").
    #[arg(long)]
    case: Option<String>,
    /// Catalog map identifier (e.g. square, cbrt, exp).
    #[arg(long)]
    g: Option<String>,
    /// Noise standard deviation for simulate tables.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    /// Noise-exposure correlation for simulate --table 3.
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    /// Sample size per replicate (default depends on --table).
    #[arg(long)]
    n: Option<usize>,
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("ASYMLAB_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| CliError::Config(format!("ASYMLAB_SEED must be a u64, got '{text}'"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn build_config(command: Command, opts: &CommonOpts) -> Result<RunConfig, CliError> {
    Ok(RunConfig {
        command,
        input: opts.input.clone(),
        x_col: opts.x_col.clone(),
        y_col: opts.y_col.clone(),
        normalize: match opts.normalize {
            NormalizeArg::None => NormalizeMode::None,
            NormalizeArg::Minmax => NormalizeMode::MinMax,
        },
        dynamics: opts.dynamics.map(|d| match d {
            DynamicsArg::Contracting => Dynamics::Contracting,
            DynamicsArg::Expanding => Dynamics::Expanding,
        }),
        alpha: opts.alpha,
        grid_length: opts.grid,
        pad_fraction: opts.pad,
        clip_floor: opts.clip_floor,
        seed: resolve_seed(opts.seed)?,
        replicates: opts.replicates,
        bootstrap: opts.bootstrap,
        knots: opts.knots,
        table: opts.table,
        case: opts.case.clone(),
        g: opts.g.clone(),
        sigma: opts.sigma,
        rho: opts.rho,
        n: opts.n,
        jobs: opts.jobs,
        format: match opts.format {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        },
    })
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let (command, opts) = match &cli.command {
        Sub::Estimate(o) => (Command::Estimate, o),
        Sub::Test(o) => (Command::Test, o),
        Sub::Simulate(o) => (Command::Simulate, o),
        Sub::Diagnose(o) => (Command::Diagnose, o),
        Sub::Density(o) => (Command::Density, o),
    };
    let config = build_config(command, opts)?;
    let report = dispatch(&config)?;
    let rendered = match config.format {
        OutputFormat::Json => to_canonical_json(&report)?,
        OutputFormat::Csv => match &report.payload {
            Payload::Density { x, density } => density_csv(x, density),
            _ => to_csv(&report)?,
        },
    };
    match &opts.out {
        Some(path) => std::fs::write(path, rendered.as_bytes())
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(rendered.as_bytes())
                .and_then(|_| if rendered.ends_with('\n') { Ok(()) } else { lock.write_all(b"\n") })
                .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("asymlab: {e}");
        std::process::exit(e.exit_code());
    }
}
