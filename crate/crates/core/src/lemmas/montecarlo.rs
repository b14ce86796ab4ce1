use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quantities::{sample_quantities, SampleQuantities};
use super::report::{Check, NEstimate, VerifierReport};
use crate::ensembles::EntryLaw;
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::stieltjes::{g_factor, shift_limit, solve_model, CovarianceModel, DEFAULT_TOL};

/// Accepted range of `MSE(2n)/MSE(n)`.
pub const MSE_RATE_BAND: (f64, f64) = (0.25, 0.8);
/// Relative tolerance on Monte Carlo means at the largest `n`.
pub const MEAN_REL_TOL: f64 = 0.1;
const MAX_RESAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaConfig {
    #[serde(with = "crate::serde_complex")]
    pub z: Complex64,
    /// Second evaluation point of the two-point variant.
    #[serde(with = "crate::serde_complex")]
    pub z2: Complex64,
    pub y: f64,
    pub law: EntryLaw,
    pub n_values: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self {
            z: Complex64::new(1.0, 1.0),
            z2: Complex64::new(2.0, 1.0),
            y: 0.5,
            law: EntryLaw::RealGaussian,
            n_values: vec![100, 200, 400],
            reps: 200,
            seed: 20_240_601,
        }
    }
}

struct Batch {
    n: usize,
    p: usize,
    samples: Vec<SampleQuantities>,
    resampled: usize,
}

fn dimension(y: f64, n: usize) -> usize {
    ((y * n as f64).round() as usize).max(1)
}

fn draw_batches(cfg: &LemmaConfig) -> Result<Vec<Batch>> {
    if cfg.n_values.is_empty() || cfg.reps == 0 {
        return Err(Error::InvalidConfig("need at least one n and one replication".into()));
    }
    if !(cfg.z.im > 0.0 && cfg.z2.im > 0.0) {
        return Err(Error::InvalidConfig("lemma checks need Im z > 0".into()));
    }
    cfg.n_values
        .iter()
        .map(|&n| {
            let p = dimension(cfg.y, n);
            let base = derive_seed(cfg.seed, n as u64);
            let drawn: Vec<(SampleQuantities, usize)> = (0..cfg.reps)
                .into_par_iter()
                .map(|rep| {
                    let seed = derive_seed(base, rep as u64);
                    let mut attempt = 0;
                    loop {
                        let s = if attempt == 0 { seed } else { derive_seed(seed, attempt as u64) };
                        match sample_quantities(cfg.z, cfg.z2, p, n, &cfg.law, s) {
                            Ok(q) => return Ok((q, attempt)),
                            Err(Error::SingularResolvent(_)) if attempt < MAX_RESAMPLES => attempt += 1,
                            Err(e) => return Err(e),
                        }
                    }
                })
                .collect::<Result<_>>()?;
            let resampled = drawn.iter().map(|(_, a)| a).sum();
            Ok(Batch { n, p, samples: drawn.into_iter().map(|(q, _)| q).collect(), resampled })
        })
        .collect()
}

fn estimates(batches: &[Batch], target: Complex64, f: impl Fn(&SampleQuantities) -> Complex64) -> Vec<NEstimate> {
    batches
        .iter()
        .map(|b| {
            let k = b.samples.len() as f64;
            let mean: Complex64 = b.samples.iter().map(&f).sum::<Complex64>() / k;
            let mse = b.samples.iter().map(|s| (f(s) - target).norm_sqr()).sum::<f64>() / k;
            NEstimate {
                n: b.n,
                p: b.p,
                mean,
                mse,
                mean_error: (mean - target).norm(),
                reps: b.samples.len(),
                resampled: b.resampled,
            }
        })
        .collect()
}

fn rate_checks(label: &str, est: &[NEstimate], band: (f64, f64)) -> (Vec<f64>, Vec<Check>) {
    let mut ratios = Vec::new();
    let mut checks = Vec::new();
    for w in est.windows(2) {
        let r = w[1].mse / w[0].mse;
        ratios.push(r);
        checks.push(Check::within(format!("{label} MSE ratio n={}→{}", w[0].n, w[1].n), r, band.0, band.1));
    }
    (ratios, checks)
}

fn mean_check(label: &str, est: &[NEstimate], target: Complex64) -> Check {
    let last = est.last().expect("nonempty");
    Check::below(format!("{label} relative mean error at n={}", last.n), last.mean_error / target.norm(), MEAN_REL_TOL)
}

fn base_report(
    id: &str,
    cfg: &LemmaConfig,
    est: Vec<NEstimate>,
    target: Complex64,
    ratios: Vec<f64>,
) -> VerifierReport {
    VerifierReport {
        lemma_id: id.into(),
        n_values: cfg.n_values.clone(),
        estimates: est,
        predicted_limit: target,
        rate_ratios: ratios,
        checks: Vec::new(),
        pass: false,
        reps: cfg.reps,
        seed: cfg.seed,
    }
}

struct Limits {
    g: Complex64,
    g_prime: Complex64,
    g2: Complex64,
    shift: Complex64,
}

fn limits(cfg: &LemmaConfig) -> Result<Limits> {
    let model = CovarianceModel::marchenko_pastur(cfg.y)?;
    let cv = solve_model(&model, cfg.z, DEFAULT_TOL)?;
    let gf = g_factor(&cv, &model)?;
    let cv2 = solve_model(&model, cfg.z2, DEFAULT_TOL)?;
    Ok(Limits {
        g: gf.g,
        g_prime: gf.g_prime,
        g2: 1.0 + cfg.z2 * cv2.m_under,
        shift: shift_limit(cfg.z, &model, DEFAULT_TOL)?,
    })
}

fn quadform_report(cfg: &LemmaConfig, b: &[Batch], lim: &Limits) -> VerifierReport {
    let est = estimates(b, lim.g, |s| s.quadform);
    let (ratios, checks) = rate_checks("γ*A⁻¹γ", &est, MSE_RATE_BAND);
    let mut r = base_report("4.2", cfg, est, lim.g, ratios);
    r.checks = checks;
    r.finalize()
}

fn quadform_sq_report(cfg: &LemmaConfig, b: &[Batch], lim: &Limits) -> VerifierReport {
    let est = estimates(b, lim.g_prime, |s| s.quadform_sq);
    let (ratios, mut checks) = rate_checks("γ*A⁻²γ", &est, MSE_RATE_BAND);
    let fd = estimates(b, lim.g_prime, |s| s.quadform_fd);
    for (a, d) in est.iter().zip(&fd) {
        checks.push(Check::below(
            format!("resolvent derivative vs central difference at n={}", a.n),
            (a.mean - d.mean).norm() / a.mean.norm().max(1.0),
            1e-6,
        ));
    }
    let mut r = base_report("cor4.1", cfg, est, lim.g_prime, ratios);
    r.checks = checks;
    r.finalize()
}

fn trace_delta_report(cfg: &LemmaConfig, b: &[Batch]) -> VerifierReport {
    let zero = Complex64::new(0.0, 0.0);
    let est = estimates(b, zero, |s| s.trace_delta);
    let (ratios, mut checks) = rate_checks("tr A⁻¹Δ", &est, MSE_RATE_BAND);
    let est_sq = estimates(b, zero, |s| s.trace_delta_sq);
    checks.extend(rate_checks("tr A⁻²Δ", &est_sq, MSE_RATE_BAND).1);
    let mut r = base_report("4.3", cfg, est, zero, ratios);
    r.checks = checks;
    r.finalize()
}

fn delta_quadratic_report(cfg: &LemmaConfig, b: &[Batch], lim: &Limits) -> VerifierReport {
    let target = lim.g * lim.g_prime;
    let est = estimates(b, target, |s| s.delta_quadratic);
    let (ratios, mut checks) = rate_checks("tr A⁻²ΔA⁻¹Δ", &est, MSE_RATE_BAND);
    checks.push(mean_check("tr A⁻²ΔA⁻¹Δ", &est, target));
    let worst_step = est.windows(2).map(|w| w[1].mean_error / w[0].mean_error).fold(0.0, f64::max);
    checks.push(Check::below("largest ratio of successive mean errors", worst_step, 1.0));
    let two_target = lim.g * lim.g2;
    let two = estimates(b, two_target, |s| s.delta_two_point);
    checks.push(mean_check("tr A⁻¹(z₁)ΔA⁻¹(z₂)Δ", &two, two_target));
    let mut r = base_report("4.4", cfg, est, target, ratios);
    r.checks = checks;
    r.finalize()
}

fn combined_report(cfg: &LemmaConfig, b: &[Batch], lim: &Limits) -> VerifierReport {
    let target = -lim.shift;
    let est = estimates(b, target, |s| s.combined());
    let (ratios, mut checks) = rate_checks("combined correction", &est, MSE_RATE_BAND);
    checks.push(mean_check("combined correction", &est, target));
    let identity = b
        .iter()
        .flat_map(|x| x.samples.iter())
        .map(|s| (s.combined() - s.resolvent_gap).norm() / s.resolvent_gap.norm().max(1.0))
        .fold(0.0, f64::max);
    checks.push(Check::below("three-term expansion vs tr(S-z)⁻¹ - tr(B-z)⁻¹ (max relative)", identity, 1e-10));
    // Cubic term against g × quadratic term; only the mean gap is tracked.
    let g = lim.g;
    let lemma45 = estimates(b, Complex64::new(0.0, 0.0), |s| s.q3 - g * s.q2);
    let first = lemma45.first().map(|e| e.mean_error).unwrap_or(f64::NAN);
    let last = lemma45.last().map(|e| e.mean_error).unwrap_or(f64::NAN);
    checks.push(Check::below(
        format!("|mean(Q₃ - g Q₂)| at n={} relative to n={}", cfg.n_values.last().unwrap(), cfg.n_values[0]),
        last / first,
        1.0,
    ));
    let mut r = base_report("4.6", cfg, est, target, ratios);
    r.checks = checks;
    r.finalize()
}

/// Runs one shared Monte Carlo pass and returns the reports for 4.2,
/// cor4.1, 4.3, 4.4 and 4.6, in that order.
pub fn run_lemma_suite(cfg: &LemmaConfig) -> Result<Vec<VerifierReport>> {
    let lim = limits(cfg)?;
    let b = draw_batches(cfg)?;
    Ok(vec![
        quadform_report(cfg, &b, &lim),
        quadform_sq_report(cfg, &b, &lim),
        trace_delta_report(cfg, &b),
        delta_quadratic_report(cfg, &b, &lim),
        combined_report(cfg, &b, &lim),
    ])
}

/// `γ₁*A⁻¹γ₁ → g(z) = 1 + z m̲(z)` with `E|·|² = O(1/n)`.
pub fn verify_quadform(cfg: &LemmaConfig) -> Result<VerifierReport> {
    Ok(quadform_report(cfg, &draw_batches(cfg)?, &limits(cfg)?))
}

/// `γ₁*A⁻²γ₁ → g'(z)`.
pub fn verify_quadform_sq(cfg: &LemmaConfig) -> Result<VerifierReport> {
    Ok(quadform_sq_report(cfg, &draw_batches(cfg)?, &limits(cfg)?))
}

/// `E|tr A⁻¹Δ|² = O(1/n)` and `E|tr A⁻²Δ|² = O(1/n)`.
pub fn verify_trace_delta(cfg: &LemmaConfig) -> Result<VerifierReport> {
    Ok(trace_delta_report(cfg, &draw_batches(cfg)?))
}

/// `tr A⁻²ΔA⁻¹Δ → g g'` and the two-point version `→ g(z₁) g(z₂)`.
pub fn verify_delta_quadratic(cfg: &LemmaConfig) -> Result<VerifierReport> {
    Ok(delta_quadratic_report(cfg, &draw_batches(cfg)?, &limits(cfg)?))
}

/// The three correction traces tend to `g g'/(-z m̲)`, the negative of the
/// shift limit.
pub fn verify_combined_correction(cfg: &LemmaConfig) -> Result<VerifierReport> {
    Ok(combined_report(cfg, &draw_batches(cfg)?, &limits(cfg)?))
}
