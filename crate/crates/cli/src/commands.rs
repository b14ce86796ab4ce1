use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rmt_lss::ensembles::{build_f_pair, draw_entries, EntryLaw, MatrixSample, PopulationShape};
use rmt_lss::harness::{
    bias_demonstration, compare_pipelines, gaussianity_report, persist_results, run_experiment, ExperimentConfig,
    Pipeline,
};
use rmt_lss::lemmas::{
    verify_combined_correction, verify_delta_quadratic, verify_exact_suite, verify_f_decomposition, verify_quadform,
    verify_quadform_sq, verify_shift, verify_trace_delta, FDecompConfig, LemmaConfig, VerifierReport,
};
use rmt_lss::lss::{lss_covariance, lss_f_matrix, TestFunction};
use rmt_lss::seed::derive_seed;
use rmt_lss::stieltjes::{
    f_support, invert_density, solve_companion, CovarianceModel, FMatrixModel, GridDensity, Ratio, SpectralModel,
    DEFAULT_EPS_SCHEDULE,
};
use rmt_lss::Error;

use crate::{parse, Command, ModelArgs, EXIT_IO, EXIT_NUMERICAL, EXIT_USAGE, EXIT_VERDICT};

/// Seed used when `--seed` is absent and no config supplies one.
const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    /// Printed to stderr; empty when the command already reported.
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    fn verdict() -> Self {
        Self { code: EXIT_VERDICT, message: String::new() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::SchemaVersionMismatch(_) | Error::ConfigHashMismatch { .. } => EXIT_IO,
            Error::InvalidConfig(_)
            | Error::InvalidRatio(_)
            | Error::InvalidWeights(_)
            | Error::InvalidLaw(_)
            | Error::InvalidPoint { .. }
            | Error::DimensionMismatch(_)
            | Error::NotAdmissible(_)
            | Error::LogOnAtom => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Self { code, message: e.to_string() }
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PipelineArg {
    CovCentralized,
    CovSimplified,
    FCentralized,
    FSimplified,
}

impl From<PipelineArg> for Pipeline {
    fn from(p: PipelineArg) -> Self {
        match p {
            PipelineArg::CovCentralized => Pipeline::CovCentralized,
            PipelineArg::CovSimplified => Pipeline::CovSimplified,
            PipelineArg::FCentralized => Pipeline::FCentralized,
            PipelineArg::FSimplified => Pipeline::FSimplified,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// One of 4.1, 4.2, cor4.1, 4.3, 4.4, 4.6, F, interlacing.
    #[arg(long)]
    lemma: String,
    #[arg(long, default_value_t = 0.5)]
    y: f64,
    #[arg(long, default_value = "1+1i", value_parser = parse::complex, allow_hyphen_values = true)]
    z: Complex64,
    #[arg(long, default_value = "2+1i", value_parser = parse::complex, allow_hyphen_values = true)]
    z2: Complex64,
    /// Comma-separated sample sizes; the exact checks use the first.
    #[arg(long, value_delimiter = ',', default_value = "100,200,400")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    p: usize,
    #[arg(long = "N", default_value_t = 200)]
    big_n: usize,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, default_value = "real-gaussian", value_parser = parse::law)]
    law: EntryLaw,
    #[arg(long, default_value = "mp", value_parser = parse::population)]
    h: rmt_lss::stieltjes::SpectralWeights,
}

#[derive(Args, Debug)]
pub struct BiasArgs {
    /// Experiment config; overrides the remaining flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    p: usize,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value = "x^2", value_parser = parse::test_function)]
    f: TestFunction,
    #[arg(long, default_value_t = 500)]
    reps: usize,
    #[arg(long, default_value = "real-gaussian", value_parser = parse::law)]
    law: EntryLaw,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareConfig {
    a: ExperimentConfig,
    b: ExperimentConfig,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure { code: EXIT_NUMERICAL, message: e.to_string() })
}

/// Echo of the resolved inputs, on stderr so stdout stays machine-readable.
fn echo(resolved: serde_json::Value, seed: Option<u64>) {
    eprintln!("resolved: {}", serde_json::json!({ "args": resolved, "seed": seed }));
}

fn write_output(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) })
}

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) })?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn verdict_line(pass: bool, reasons: &[String]) -> CmdResult {
    if pass {
        println!("PASS");
        Ok(())
    } else {
        println!("FAIL {}", reasons.join("; "));
        Err(Failure::verdict())
    }
}

/// `path` with `suffix` inserted before the extension.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.json"))
}

pub fn dispatch(command: Command, seed: Option<u64>) -> CmdResult {
    match command {
        Command::Solve { z, y, h, tol } => {
            echo(serde_json::json!({ "command": "solve", "z": [z.re, z.im], "y": y, "h": h, "tol": tol }), seed);
            let cv = solve_companion(z, Ratio::limit(y)?, &h, tol)?;
            println!("{}", to_json(&cv)?);
            Ok(())
        }
        Command::Density { model, grid, format, output } => {
            echo(serde_json::json!({ "command": "density", "model": model_echo(&model), "grid": grid }), seed);
            let density = with_model(&model, |m| invert_density(m, grid, DEFAULT_EPS_SCHEDULE))??;
            eprintln!("support: {:.6} {:.6}", density.support_lo, density.support_hi);
            let text = match format {
                Format::Csv => density_csv(&density),
                Format::Json => to_json(&density)?,
            };
            match output {
                Some(path) => write_output(&path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Support { model } => {
            echo(serde_json::json!({ "command": "support", "model": model_echo(&model) }), seed);
            let (lo, hi) = match (model.y, model.y1, model.y2) {
                (_, Some(y1), Some(y2)) => f_support(y1, y2)?,
                _ => with_model(&model, |m| m.support())?,
            };
            println!("{lo:.6} {hi:.6}");
            Ok(())
        }
        Command::Lss { pipeline, p, n, big_n, f, law } => {
            let seed = seed.unwrap_or(DEFAULT_SEED);
            let pipeline = Pipeline::from(pipeline);
            echo(
                serde_json::json!({ "command": "lss", "pipeline": pipeline, "p": p, "n": n, "N": big_n, "f": f, "law": law }),
                Some(seed),
            );
            let value = if pipeline.is_f_matrix() {
                let big_n = big_n.ok_or_else(|| Failure::usage("F pipelines need --N"))?;
                let x = draw_entries(p, n, &law, derive_seed(seed, 0))?;
                let y = draw_entries(p, big_n, &law, derive_seed(seed, 1))?;
                let pair =
                    build_f_pair(x, y, &PopulationShape::Identity, (derive_seed(seed, 0), derive_seed(seed, 1)))?;
                lss_f_matrix(&pair, &f, pipeline.is_centralized())?
            } else {
                let sample = MatrixSample::draw(p, n, &law, &PopulationShape::Identity, seed)?;
                lss_covariance(&sample, &f, pipeline.is_centralized())?
            };
            println!("{}", to_json(&value)?);
            Ok(())
        }
        Command::Verify(args) => verify(args, seed),
        Command::Experiment { config, output } => {
            let mut cfg: ExperimentConfig = read_config(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            echo(serde_json::to_value(&cfg).unwrap_or_default(), Some(cfg.master_seed));
            let result = run_experiment(&cfg)?;
            let path = output.unwrap_or_else(|| sibling(&config, "results"));
            let csv = persist_results(&result, &path)?;
            eprintln!("wrote {} and {}", path.display(), csv.display());
            println!("{}", to_json(&result.stats)?);
            if result.samples.len() >= 500 {
                let report = gaussianity_report(&result.samples)?;
                let reasons: Vec<String> = report
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| format!("{} = {:.6} outside {}", c.name, c.value, c.threshold))
                    .collect();
                verdict_line(report.pass, &reasons)
            } else {
                println!("PASS (normality not assessed below 500 replications)");
                Ok(())
            }
        }
        Command::Compare { config, output } => {
            let mut cfg: CompareConfig = read_config(&config)?;
            if let Some(s) = seed {
                cfg.a.master_seed = s;
                cfg.b.master_seed = derive_seed(s, 1);
            }
            echo(serde_json::to_value(&cfg).unwrap_or_default(), Some(cfg.a.master_seed));
            let outcome = compare_pipelines(&cfg.a, &cfg.b)?;
            let path = output.unwrap_or_else(|| sibling(&config, "report"));
            let report = to_json(&outcome.report)?;
            write_output(&path, &report)?;
            persist_results(&outcome.result_a, &sibling(&path, "a"))?;
            persist_results(&outcome.result_b, &sibling(&path, "b"))?;
            println!("{report}");
            verdict_line(outcome.report.verdict.pass, &outcome.report.verdict.reasons)
        }
        Command::BiasDemo(args) => {
            let mut cfg = match &args.config {
                Some(path) => read_config(path)?,
                None => ExperimentConfig {
                    law_x: args.law.clone(),
                    ..ExperimentConfig::covariance(true, args.p, args.n, args.f.clone(), args.reps, DEFAULT_SEED)
                },
            };
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            echo(serde_json::to_value(&cfg).unwrap_or_default(), Some(cfg.master_seed));
            let report = bias_demonstration(&cfg)?;
            println!("{}", to_json(&report)?);
            println!("offset {:.6}", report.empirical_offset);
            println!("deterministic gap {:.6}", report.gap.finite);
            println!("limit {:.6}", report.gap.limit);
            println!("alternative bias integral {:.6} (diagnostic)", report.gap.pan);
            let pass = report.bookkeeping_error < 1e-10;
            verdict_line(
                pass,
                &[format!("offset differs from the deterministic gap by {:e}", report.bookkeeping_error)],
            )
        }
    }
}

fn model_echo(model: &ModelArgs) -> serde_json::Value {
    serde_json::json!({ "y": model.y, "h": model.h, "y1": model.y1, "y2": model.y2 })
}

/// Runs `f` on the covariance or F-matrix model described by `args`.
fn with_model<T>(args: &ModelArgs, f: impl FnOnce(&dyn SpectralModel) -> T) -> Result<T, Failure> {
    match (args.y, args.y1, args.y2) {
        (Some(y), None, None) => Ok(f(&CovarianceModel::new(Ratio::limit(y)?, args.h.clone()))),
        (None, Some(y1), Some(y2)) => Ok(f(&FMatrixModel::from_limits(y1, y2)?)),
        _ => Err(Failure::usage("give either --y or both --y1 and --y2")),
    }
}

fn density_csv(d: &GridDensity) -> String {
    let mut out = String::from("x,density\n");
    for (x, v) in d.xs.iter().zip(&d.density) {
        out.push_str(&format!("{x:?},{v:?}\n"));
    }
    out
}

fn verify(args: VerifyArgs, seed: Option<u64>) -> CmdResult {
    let first_n = *args.n.first().ok_or_else(|| Failure::usage("--n needs at least one value"))?;
    let report: VerifierReport = match args.lemma.as_str() {
        "4.1" => {
            echo(
                serde_json::json!({ "lemma": "4.1", "y": args.y, "z": [args.z.re, args.z.im], "n": args.n, "h": args.h }),
                seed,
            );
            verify_shift(args.z, args.y, &args.n, &args.h)?
        }
        "4.2" | "cor4.1" | "4.3" | "4.4" | "4.6" => {
            let cfg = LemmaConfig {
                z: args.z,
                z2: args.z2,
                y: args.y,
                law: args.law.clone(),
                n_values: args.n.clone(),
                reps: args.reps.unwrap_or(200),
                seed: seed.unwrap_or(LemmaConfig::default().seed),
            };
            echo(serde_json::to_value(&cfg).unwrap_or_default(), Some(cfg.seed));
            match args.lemma.as_str() {
                "4.2" => verify_quadform(&cfg)?,
                "cor4.1" => verify_quadform_sq(&cfg)?,
                "4.3" => verify_trace_delta(&cfg)?,
                "4.4" => verify_delta_quadratic(&cfg)?,
                _ => verify_combined_correction(&cfg)?,
            }
        }
        "F" => {
            let cfg = FDecompConfig {
                z: args.z,
                p: args.p,
                n: first_n,
                big_n: args.big_n,
                law: args.law.clone(),
                reps: args.reps.unwrap_or(100),
                seed: seed.unwrap_or(FDecompConfig::default().seed),
            };
            echo(serde_json::to_value(&cfg).unwrap_or_default(), Some(cfg.seed));
            verify_f_decomposition(&cfg)?
        }
        "interlacing" => {
            let reps = args.reps.unwrap_or(1000);
            let seed = seed.unwrap_or(DEFAULT_SEED);
            echo(
                serde_json::json!({ "lemma": "interlacing", "p": args.p, "n": first_n, "reps": reps, "law": args.law }),
                Some(seed),
            );
            verify_exact_suite(args.p, first_n, &args.law, args.z, reps, seed)?
        }
        other => {
            return Err(Failure::usage(format!(
                "unknown lemma {other:?}; expected one of 4.1, 4.2, cor4.1, 4.3, 4.4, 4.6, F, interlacing"
            )))
        }
    };
    println!("{}", to_json(&report)?);
    let reasons: Vec<String> =
        report.failed_checks().iter().map(|c| format!("{} = {:e} outside {}", c.name, c.value, c.threshold)).collect();
    verdict_line(report.pass, &reasons)
}
