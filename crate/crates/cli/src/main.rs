mod commands;
mod json;

use clap::{Parser, Subcommand, ValueEnum};
use hessext_core::CoreError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Desk-scale experiments for the supercritical radial k-Hessian extremal
/// problem: norms and bounds, extremal solves, boundary-value shooting,
/// expansion verification, and mountain-pass level estimates.
#[derive(Parser, Debug)]
#[command(name = "hessext", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug, Clone)]
struct CommonArgs {
    /// Space dimension N >= 3
    #[arg(long = "N", default_value_t = 5)]
    dim: u32,

    /// Hessian order k with 1 <= k < N/2
    #[arg(long = "k", default_value_t = 1)]
    k: u32,

    /// Exponent perturbation alpha > 0
    #[arg(long = "alpha", default_value_t = 1.0)]
    alpha: f64,

    /// Number of grid nodes (>= 256)
    #[arg(long = "grid-n", default_value_t = 4096)]
    grid_n: usize,

    /// Grading exponent of the mesh
    #[arg(long = "grid-g", default_value_t = 3.0)]
    grid_g: f64,

    /// Comma-separated strictly decreasing scale ladder in (0, 0.25)
    #[arg(long = "eps", default_value = "1e-2,1e-3,1e-4", value_delimiter = ',')]
    eps: Vec<f64>,

    /// Seed for randomized checks
    #[arg(long = "seed", default_value_t = 0)]
    seed: u64,

    /// Output format (csv applies to the expansions table)
    #[arg(long = "format", value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Output path (stdout when omitted)
    #[arg(long = "out")]
    out: Option<PathBuf>,

    /// Worker threads for independent ladder entries
    #[arg(long = "jobs", default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Property-suite outcomes for the pointwise bound and boundedness checks
    Inequality(CommonArgs),
    /// Maximize the supercritical functional on the unit gradient sphere
    Extremal(CommonArgs),
    /// Shoot the radial supercritical k-Hessian boundary-value problem
    SolveHessian(CommonArgs),
    /// Verify the asymptotic-expansion branches along the scale ladder
    Expansions(CommonArgs),
    /// Instanton-ray energy maxima against the noncompactness threshold
    MountainPass(CommonArgs),
    /// Everything above, concatenated into one JSON document
    Report(CommonArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HESSEXT_LOG", "warn")).init();
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Inequality(a) => ("inequality", a),
        Command::Extremal(a) => ("extremal", a),
        Command::SolveHessian(a) => ("solve-hessian", a),
        Command::Expansions(a) => ("expansions", a),
        Command::MountainPass(a) => ("mountain-pass", a),
        Command::Report(a) => ("report", a),
    };
    match commands::run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &commands::CliError) -> u8 {
    match err {
        commands::CliError::Config(_) => 2,
        commands::CliError::Io(_) => 1,
        commands::CliError::Core(core) => match core {
            CoreError::InvalidParams(_) | CoreError::InvalidInput(_) | CoreError::Domain(_) => 2,
            CoreError::Unconverged(_) | CoreError::InvalidBracket { .. } => 3,
            CoreError::InternalConsistency(_) | CoreError::Degeneracy(_) => 4,
        },
        commands::CliError::Unconverged(_) => 3,
    }
}
