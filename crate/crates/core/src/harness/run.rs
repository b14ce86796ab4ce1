use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{CenteringConvention, ExperimentConfig, Pipeline};
use super::stats::{ks_two_sample_p_value, SummaryStats};
use crate::ensembles::{centralized_cov, draw_entries, f_spectrum, simplified_cov};
use crate::error::{Error, Result};
use crate::lemmas::Check;
use crate::lss::{
    centering_integral, covariance_model, deterministic_centering_gap, f_matrix_model, linear_statistic, CenteringGap,
    TestFunction,
};
use crate::seed::derive_seed;

/// Redraws allowed before a run is abandoned, as a fraction of `reps`.
pub const MAX_FAILURE_RATE: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Centered statistic per replication, in replication order.
    pub samples: Vec<f64>,
    /// Seed that produced each sample (after any redraws).
    pub seeds: Vec<u64>,
    pub stats: SummaryStats,
    /// `∫ f dF` at the centering ratios; each sample is `Σ f(λ_i) - p·centering`.
    pub centering: f64,
    /// Replications redrawn after a singular or inadmissible draw.
    pub failures: usize,
}

struct Replications {
    sums: Vec<f64>,
    seeds: Vec<u64>,
    failures: usize,
}

fn is_redrawable(e: &Error) -> bool {
    matches!(e, Error::SingularSy { .. } | Error::NotAdmissible(_))
}

/// `Σ f(λ_i)` for one draw.
fn raw_statistic(config: &ExperimentConfig, seed: u64) -> Result<f64> {
    let eigs = match config.pipeline {
        Pipeline::CovCentralized | Pipeline::CovSimplified => {
            let x = draw_entries(config.p, config.n, &config.law_x, seed)?;
            if config.pipeline.is_centralized() {
                centralized_cov(&x, &config.shape)?.1
            } else {
                simplified_cov(&x, &config.shape)?.1
            }
        }
        Pipeline::FCentralized | Pipeline::FSimplified => {
            let big_n = config.big_n.ok_or_else(|| Error::InvalidConfig("F pipelines need N".into()))?;
            let x = draw_entries(config.p, config.n, &config.law_x, derive_seed(seed, 0))?;
            let y = draw_entries(config.p, big_n, &config.law_y, derive_seed(seed, 1))?;
            f_spectrum(&x, &y, &config.shape, config.pipeline.is_centralized())?.0
        }
    };
    linear_statistic(&eigs, &config.f)
}

fn replicate(config: &ExperimentConfig) -> Result<Replications> {
    config.validate()?;
    let max_failures = (MAX_FAILURE_RATE * config.reps as f64).floor() as usize;
    let outcomes: Vec<Result<(f64, u64, usize)>> = (0..config.reps as u64)
        .into_par_iter()
        .map(|i| {
            let base = derive_seed(config.master_seed, i);
            let mut seed = base;
            for attempt in 0..=max_failures {
                match raw_statistic(config, seed) {
                    Ok(v) => return Ok((v, seed, attempt)),
                    Err(e) if is_redrawable(&e) => seed = derive_seed(base, attempt as u64 + 1),
                    Err(e) => return Err(e),
                }
            }
            Err(Error::TooManyFailures { failures: max_failures + 1, reps: config.reps })
        })
        .collect();

    let mut reps =
        Replications { sums: Vec::with_capacity(config.reps), seeds: Vec::with_capacity(config.reps), failures: 0 };
    for outcome in outcomes {
        let (v, seed, failed) = outcome?;
        reps.sums.push(v);
        reps.seeds.push(seed);
        reps.failures += failed;
    }
    if reps.failures > max_failures {
        return Err(Error::TooManyFailures { failures: reps.failures, reps: config.reps });
    }
    Ok(reps)
}

/// `∫ f dF` under `convention`, computed once per experiment.
fn centering_for(config: &ExperimentConfig, convention: CenteringConvention) -> Result<f64> {
    let nminus1 = convention == CenteringConvention::Nminus1;
    if config.pipeline.is_f_matrix() {
        let big_n = config.big_n.ok_or_else(|| Error::InvalidConfig("F pipelines need N".into()))?;
        centering_integral(&config.f, &f_matrix_model(config.p, config.n, big_n, nminus1)?)
    } else {
        centering_integral(&config.f, &covariance_model(config.p, config.n, config.shape.spectrum(config.p)?, nminus1)?)
    }
}

fn centered(sums: &[f64], p: usize, centering: f64) -> Vec<f64> {
    sums.iter().map(|s| s - p as f64 * centering).collect()
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let centering = centering_for(config, config.centering_convention)?;
    let reps = replicate(config)?;
    let samples = centered(&reps.sums, config.p, centering);
    Ok(ExperimentResult {
        config: config.clone(),
        stats: SummaryStats::from_samples(&samples)?,
        samples,
        seeds: reps.seeds,
        centering,
        failures: reps.failures,
    })
}

/// Acceptance thresholds, stored with every comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Mean difference must stay below this many combined standard errors.
    pub mean_se_multiple: f64,
    pub var_ratio_lo: f64,
    pub var_ratio_hi: f64,
    pub ks_p_min: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { mean_se_multiple: 3.0, var_ratio_lo: 0.8, var_ratio_hi: 1.25, ks_p_min: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    /// Failed checks, empty on a pass.
    pub reasons: Vec<String>,
}

impl Verdict {
    fn from_checks(checks: &[Check]) -> Self {
        let reasons: Vec<String> = checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} = {:.6} outside {}", c.name, c.value, c.threshold))
            .collect();
        Self { pass: reasons.is_empty(), reasons }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub stats_a: SummaryStats,
    pub stats_b: SummaryStats,
    pub mean_diff: f64,
    pub mean_diff_se: f64,
    pub var_ratio: f64,
    pub var_ratio_se: f64,
    pub ks_p_value: f64,
    pub thresholds: Thresholds,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
}

impl ComparisonReport {
    /// Rebuilds the report from two sample lists.
    pub fn from_samples(a: &[f64], b: &[f64], thresholds: Thresholds) -> Result<Self> {
        let stats_a = SummaryStats::from_samples(a)?;
        let stats_b = SummaryStats::from_samples(b)?;
        let mean_diff = stats_a.mean - stats_b.mean;
        let mean_diff_se = stats_a.se_mean.hypot(stats_b.se_mean);
        let var_ratio = stats_a.variance / stats_b.variance;
        let var_ratio_se =
            var_ratio * (stats_a.se_variance / stats_a.variance).hypot(stats_b.se_variance / stats_b.variance);
        let ks_p_value = ks_two_sample_p_value(a, b);
        let checks = vec![
            Check::below(
                "|mean difference| / combined SE",
                mean_diff.abs() / mean_diff_se,
                thresholds.mean_se_multiple,
            ),
            Check::within("variance ratio", var_ratio, thresholds.var_ratio_lo, thresholds.var_ratio_hi),
            Check {
                name: "two-sample KS p-value".into(),
                value: ks_p_value,
                threshold: format!("> {}", thresholds.ks_p_min),
                pass: ks_p_value > thresholds.ks_p_min,
            },
        ];
        let verdict = Verdict::from_checks(&checks);
        Ok(Self {
            stats_a,
            stats_b,
            mean_diff,
            mean_diff_se,
            var_ratio,
            var_ratio_se,
            ks_p_value,
            thresholds,
            checks,
            verdict,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonOutcome {
    pub report: ComparisonReport,
    pub result_a: ExperimentResult,
    pub result_b: ExperimentResult,
}

/// Two-sample test of equal distributions for two experiments on the same
/// `p`, `n`, `N` and `f`.
pub fn compare_pipelines(config_a: &ExperimentConfig, config_b: &ExperimentConfig) -> Result<ComparisonOutcome> {
    if (config_a.p, config_a.n, config_a.big_n) != (config_b.p, config_b.n, config_b.big_n) || config_a.f != config_b.f
    {
        return Err(Error::InvalidConfig("compared experiments must share p, n, N and f".into()));
    }
    let result_a = run_experiment(config_a)?;
    let result_b = run_experiment(config_b)?;
    let report = ComparisonReport::from_samples(&result_a.samples, &result_b.samples, Thresholds::default())?;
    Ok(ComparisonOutcome { report, result_a, result_b })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub p: usize,
    pub n: usize,
    pub f: TestFunction,
    pub reps: usize,
    pub master_seed: u64,
    /// Mean of the centralized statistic centered at `p/(n-1)`.
    pub correct_mean: f64,
    /// Mean of the same draws centered at `p/n`.
    pub wrong_mean: f64,
    /// `wrong_mean - correct_mean`
    pub empirical_offset: f64,
    /// Deterministic offset, its large-`n` limit and the alternative bias
    /// integral (diagnostic only).
    pub gap: CenteringGap,
    /// `|empirical_offset - gap.finite|`
    pub bookkeeping_error: f64,
}

/// Centers one set of centralized covariance draws both ways and measures
/// the shift in the mean.
pub fn bias_demonstration(config: &ExperimentConfig) -> Result<BiasReport> {
    if config.pipeline != Pipeline::CovCentralized {
        return Err(Error::InvalidConfig("the bias demonstration runs the cov-centralized pipeline".into()));
    }
    config.validate()?;
    let right = centering_for(config, CenteringConvention::Nminus1)?;
    let wrong = centering_for(config, CenteringConvention::N)?;
    let gap = deterministic_centering_gap(&config.f, config.p, config.n, &config.shape.spectrum(config.p)?)?;
    let reps = replicate(config)?;
    let mean = |v: Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    let correct_mean = mean(centered(&reps.sums, config.p, right));
    let wrong_mean = mean(centered(&reps.sums, config.p, wrong));
    let empirical_offset = wrong_mean - correct_mean;
    Ok(BiasReport {
        p: config.p,
        n: config.n,
        f: config.f.clone(),
        reps: config.reps,
        master_seed: config.master_seed,
        correct_mean,
        wrong_mean,
        empirical_offset,
        gap,
        bookkeeping_error: (empirical_offset - gap.finite).abs(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianityReport {
    pub stats: SummaryStats,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Skewness and excess kurtosis within 3 SE of zero and a KS p-value above 0.01.
pub fn gaussianity_report(samples: &[f64]) -> Result<GaussianityReport> {
    if samples.len() < 500 {
        return Err(Error::InvalidConfig(format!("gaussianity needs at least 500 samples, got {}", samples.len())));
    }
    let stats = SummaryStats::from_samples(samples)?;
    let checks = vec![
        Check::below("|skewness| / SE", stats.skewness.abs() / stats.se_skewness, 3.0),
        Check::below("|excess kurtosis| / SE", stats.excess_kurtosis.abs() / stats.se_excess_kurtosis, 3.0),
        Check {
            name: "KS p-value vs fitted normal".into(),
            value: stats.normality_p_value,
            threshold: "> 0.01".into(),
            pass: stats.normality_p_value > 0.01,
        },
    ];
    let pass = checks.iter().all(|c| c.pass);
    Ok(GaussianityReport { stats, checks, pass })
}
