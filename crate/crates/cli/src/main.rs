//! `sfa`: sparse frequency analysis from the command line.
//!
//! Exit codes: 0 success, 1 solver did not converge, 2 I/O or input data,
//! 3 configuration, 4 usage.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sfa_core::SfaError;

#[derive(Parser, Debug)]
#[command(name = "sfa", version, about = "Sparse frequency analysis of real signals")]
pub struct Cli {
    /// Worker threads for the solver (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, env = "SFA_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a built-in test signal.
    Synth(SynthArgs),
    /// Decompose a signal; writes decomposition.json, a.csv, b.csv,
    /// spectrum.csv (k,f_k,z_k), trace.csv and manifest.json.
    Analyze(AnalyzeArgs),
    /// Extract a band from a decomposition; writes n,t,g,aM,bM,theta_deg.
    Band(BandArgs),
    /// Phase difference and sliding PLV of two band files; writes n,t,dtheta_deg,plv.
    Phasediff(PhasediffArgs),
    /// Total variation denoising of a signal CSV.
    Tvd(TvdArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Example1,
    Example3,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    P0,
    P1,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    /// f_k = k / (2K): K frequencies covering [0, 0.5).
    Half,
    /// f_k = k / K: K frequencies covering [0, 1).
    Full,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Center {
    Grid,
    Mid,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub preset: Preset,
    /// Noise seed (example3 only; defaults to the preset's seed).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth components as CSV (n,<component>...).
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Signal CSV.
    pub input: PathBuf,
    /// Solver configuration JSON; unset fields take their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Take grid, mode and solver settings from a built-in preset.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Number of frequencies K (default: N, or the preset's).
    #[arg(long)]
    pub freqs: Option<usize>,
    #[arg(long, value_enum)]
    pub grid: Option<GridKind>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BandArgs {
    /// Directory written by `analyze`.
    #[arg(long)]
    pub decomp: PathBuf,
    /// Comma-separated frequency indices.
    #[arg(long, conflicts_with_all = ["band_lo", "band_hi", "weights"])]
    pub indices: Option<String>,
    #[arg(long, requires = "band_hi")]
    pub band_lo: Option<usize>,
    #[arg(long, requires = "band_lo")]
    pub band_hi: Option<usize>,
    /// File with K nonnegative weights, one per line.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Center of merged odd-width bands; even widths always use the midpoint.
    #[arg(long, value_enum, default_value = "grid")]
    pub center: Center,
    /// Truth CSV to compare g against; prints the relative RMSE.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Column of the truth CSV (default: first after `n`).
    #[arg(long)]
    pub truth_column: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PhasediffArgs {
    pub band1: PathBuf,
    pub band2: PathBuf,
    #[arg(long)]
    pub plv_window: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TvdArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub lam: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NotConverged(String),
    #[error(transparent)]
    Core(#[from] SfaError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::NotConverged(_) => 1,
            CliError::Usage(_) => 4,
            CliError::Core(e) => match e {
                SfaError::Config { .. } => 3,
                SfaError::EmptyIndexSet
                | SfaError::IndexOutOfRange { .. }
                | SfaError::NonContiguous
                | SfaError::EvenCardinality { .. }
                | SfaError::BadBand { .. }
                | SfaError::WindowTooLarge { .. } => 4,
                SfaError::NonFinite { .. } | SfaError::DegenerateScale(_) => 1,
                _ => 2,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| commands::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
