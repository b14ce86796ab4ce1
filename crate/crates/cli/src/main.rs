//! `rmt-lss`: command-line front end for the Stieltjes solvers, lemma
//! verifiers and replication harness.

mod commands;
mod parse;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rmt_lss::ensembles::EntryLaw;
use rmt_lss::lss::TestFunction;
use rmt_lss::stieltjes::SpectralWeights;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_VERDICT: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "rmt-lss", version, about = "Spectral statistics of centralized sample covariance and F-matrices")]
struct Cli {
    /// Master seed; overrides the seed in any config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

/// Covariance ratio `y` with a population spectrum, or an F-matrix `(y₁, y₂)`.
#[derive(Args, Debug, Clone)]
struct ModelArgs {
    #[arg(long, conflicts_with_all = ["y1", "y2"])]
    y: Option<f64>,
    /// Population spectrum: `mp` or `atoms=t1:w1,t2:w2,…`.
    #[arg(long, default_value = "mp", value_parser = parse::population)]
    h: SpectralWeights,
    #[arg(long, requires = "y2")]
    y1: Option<f64>,
    #[arg(long, requires = "y1")]
    y2: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the companion equation at one point.
    Solve {
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long)]
        y: f64,
        #[arg(long, default_value = "mp", value_parser = parse::population)]
        h: SpectralWeights,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Tabulate the limiting density as `x,density` CSV.
    Density {
        #[command(flatten)]
        model: ModelArgs,
        /// Grid points across the support with a 10% margin.
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: commands::Format,
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
    /// Print the support endpoints of the continuous part.
    Support {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Draw one sample and evaluate a centered linear spectral statistic.
    Lss {
        #[arg(long, value_enum, default_value = "cov-centralized")]
        pipeline: commands::PipelineArg,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "N")]
        big_n: Option<usize>,
        #[arg(long, value_parser = parse::test_function)]
        f: TestFunction,
        #[arg(long, default_value = "real-gaussian", value_parser = parse::law)]
        law: EntryLaw,
    },
    /// Run one lemma verifier and print its report.
    Verify(commands::VerifyArgs),
    /// Run a replication experiment from a JSON config.
    Experiment {
        #[arg(long)]
        config: std::path::PathBuf,
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
    /// Compare two experiments given as `{"a": config, "b": config}`.
    Compare {
        #[arg(long)]
        config: std::path::PathBuf,
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
    /// Show the mean offset produced by centering at `p/n` instead of `p/(n-1)`.
    BiasDemo(commands::BiasArgs),
}

fn configure_threads() -> Result<(), commands::Failure> {
    let Ok(value) = std::env::var("RMT_THREADS") else {
        return Ok(());
    };
    let threads: usize =
        value.parse().ok().filter(|t| *t > 0).ok_or_else(|| {
            commands::Failure::usage(format!("RMT_THREADS must be a positive integer, got {value:?}"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| commands::Failure::usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = configure_threads().and_then(|()| commands::dispatch(cli.command, cli.seed));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}
