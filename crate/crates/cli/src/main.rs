//! `hklab`: batch front-end for the radial Schrödinger operator lab.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use hklab::ErrorKind;
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] hklab::Error),
}

macro_rules! core_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}

core_error!(
    hklab::potential::PotentialError,
    hklab::harmonic::HarmonicError,
    hklab::criticality::CriticalityError,
    hklab::weights::WeightError,
    hklab::heatkernel::KernelError,
    hklab::bounds::BoundsError
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 4,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Convergence => 3,
                ErrorKind::Io => 4,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hklab", version, about = "Harmonic functions, criticality and heat-kernel bounds for -Δ + V(|x|)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV/JSON artifacts.
    #[arg(long, short, global = true, env = "HKLAB_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
    /// Override any config value, e.g. `--set harmonic.points_per_decade=128`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Seed for sample selection.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Shorthand for `--set potential.dimension=N`.
    #[arg(long, short = 'n', global = true)]
    dimension: Option<u32>,
    /// Shorthand for `--set potential.lambda=L`; selects the inverse-square
    /// family unless the config names another one.
    #[arg(long, short = 'l', global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// More log output (repeatable).
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Roots A± of α² + (N-2)α - λ = 0.
    Exponents,
    /// Positive harmonic profile U with its asymptotic fits.
    Harmonic,
    /// Subcritical / critical / supercritical verdict.
    Classify,
    /// Coupling threshold μ* for H - μW.
    MuStar,
    /// A₂ diagnostics of the weight U².
    A2,
    /// Heat kernel slice assembled from radial modes.
    Kernel,
    /// Fit envelope constants against a kernel slice.
    Verify,
    /// Check the supersolution inequality for ζ(s)[U - κ F[U] / s].
    Supersolution,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let overrides = config::Overrides {
        sets: cli.sets.clone(),
        output_dir: cli.output_dir.clone(),
        seed: cli.seed,
        dimension: cli.dimension,
        lambda: cli.lambda,
    };
    let cfg = config::load(cli.config.as_deref(), &overrides)?;
    let (name, output) = match cli.command {
        Command::Exponents => ("exponents", commands::exponents(&cfg)?),
        Command::Harmonic => ("harmonic", commands::harmonic(&cfg)?),
        Command::Classify => ("classify", commands::classify(&cfg)?),
        Command::MuStar => ("mu_star", commands::mu_star(&cfg)?),
        Command::A2 => ("a2", commands::a2(&cfg)?),
        Command::Kernel => ("kernel", commands::kernel(&cfg)?),
        Command::Verify => ("verify", commands::verify(&cfg)?),
        Command::Supersolution => ("supersolution", commands::supersolution(&cfg)?),
    };
    commands::emit(name, &cfg, output)
}
