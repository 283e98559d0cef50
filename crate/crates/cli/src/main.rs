//! `qcpm`: train, sample and analyse bivariate quantum Chebyshev
//! probabilistic models.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error (including a
//! missing input file).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcpm_core::diagnostics::SweepQuantity;
use qcpm_core::io::SynthKind;
use qcpm_core::model::Init;
use qcpm_core::sim::Entangler;

const SUBCOMMANDS: [&str; 4] = ["train", "sample", "diagnose", "compare-cc"];

#[derive(Debug, Parser)]
#[command(name = "qcpm", version, about, args_override_self = true)]
struct Cli {
    /// `key = value` file of long-flag defaults; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// More log output on stderr (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model to a grid file or a synthetic target.
    Train(TrainArgs),
    /// Sample a trained model on the (optionally extended) node lattice.
    Sample(SampleArgs),
    /// Entanglement and correlation diagnostics of trained models.
    Diagnose(DiagnoseArgs),
    /// Train with and without the correlation layer and tabulate R^2.
    CompareCc(CompareArgs),
}

#[derive(Debug, Clone, Args)]
struct ModelArgs {
    /// Qubits per register.
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Ansatz blocks per register.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Drop the correlation layer between the registers.
    #[arg(long)]
    no_correlation: bool,
    /// CNOT chain of the ansatz: `closed` or `open`.
    #[arg(long, default_value_t = Entangler::Closed)]
    entangler: Entangler,
}

#[derive(Debug, Clone, Args)]
struct OptimArgs {
    #[arg(long, default_value_t = 10_000)]
    epochs: usize,
    /// Comma-separated learning rates in (0, 1].
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0"
    )]
    lr: Vec<f64>,
    /// Refit (alpha, beta) by least squares after every step.
    #[arg(long)]
    refit_affine: bool,
    /// Starting angles: `uniform` or `product-start` (Z angles zero).
    #[arg(long, default_value_t = Init::Uniform)]
    init: Init,
}

#[derive(Debug, Clone, Args)]
struct TargetArgs {
    /// Grid file(s) in the `z,Q,value` format.
    #[arg(long, value_name = "FILE", num_args = 1.., value_delimiter = ',')]
    grid: Vec<PathBuf>,
    /// Synthetic target(s): teacher_student, gaussian_2d, separable_beta.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    synth: Vec<SynthKind>,
    /// Seed of the synthetic target.
    #[arg(long, default_value_t = 0)]
    synth_seed: u64,
    /// Correlation coefficient of gaussian_2d.
    #[arg(long, default_value_t = 0.6)]
    rho: f64,
    /// Width of gaussian_2d in Chebyshev units.
    #[arg(long, default_value_t = 0.45)]
    sigma: f64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    optim: OptimArgs,
    /// Seed of the initial angles.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record the nonpurity every K epochs.
    #[arg(long, value_name = "K")]
    nonpurity_cadence: Option<usize>,
    /// Training record output.
    #[arg(long, default_value = "qcpm_record.txt")]
    record: PathBuf,
    /// Trained-parameter output.
    #[arg(long, default_value = "qcpm_params.json")]
    params_out: PathBuf,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Trained-parameter file.
    #[arg(long, default_value = "qcpm_params.json")]
    params: PathBuf,
    /// Extension qubits per register.
    #[arg(long, default_value_t = 0)]
    s: usize,
    #[arg(long, default_value_t = 1_000_000)]
    shots: u64,
    /// Multiply the shot count by 4^S.
    #[arg(long)]
    scale_shots: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write exact probabilities instead of drawing shots.
    #[arg(long)]
    exact_only: bool,
    #[arg(long, default_value = "qcpm_histogram.txt")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    /// Trained-parameter file(s); the entropy table uses all of them.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_value = "qcpm_params.json")]
    params: Vec<PathBuf>,
    /// Training record, needed by --nonpurity-trace.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Per-epoch nonpurity stored in --record.
    #[arg(long)]
    nonpurity_trace: bool,
    /// Sweep `purity` or `mutual-information` over z at fixed --v.
    #[arg(long, value_name = "QUANTITY")]
    z_sweep: Option<SweepQuantity>,
    /// Fixed Chebyshev coordinate of Q for --z-sweep.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    v: f64,
    /// Equispaced sweep points (lattice points are appended).
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    /// Half-register entropy of each model's coefficient state.
    #[arg(long)]
    entropy: bool,
    /// Directory for the series files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    optim: OptimArgs,
    /// Comma-separated initialization seeds shared by both variants.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    seeds: Vec<u64>,
    #[arg(long, default_value = "qcpm_compare.txt")]
    out: PathBuf,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<qcpm_core::Error> for Failure {
    fn from(e: qcpm_core::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn with_config(mut args: Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(path) = config::take_config_path(&mut args)? else {
        return Ok(args);
    };
    let tokens = config::expand(&path)?;
    let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(args);
    };
    args.splice(pos + 1..pos + 1, tokens);
    Ok(args)
}

fn init_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("QCPM_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Failure::Usage(format!(
                "QCPM_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Runtime(e.into()))
}

fn run() -> Result<(), Failure> {
    let args = with_config(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            // --help and --version print to stdout and succeed
            e.print().ok();
            std::process::exit(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    init_threads()?;
    match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Sample(a) => commands::sample(a),
        Command::Diagnose(a) => commands::diagnose(a),
        Command::CompareCc(a) => commands::compare_cc(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
