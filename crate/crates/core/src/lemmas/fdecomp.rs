use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Check, NEstimate, VerifierReport};
use crate::ensembles::{centralized_cov, draw_entries, EntryLaw, PopulationShape};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::stieltjes::{empirical_conditional_transform, mp_stieltjes, solve_model, FMatrixModel, Ratio, DEFAULT_TOL};

const IDENTITY_TOL: f64 = 1e-6;
const MAX_RESAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FDecompConfig {
    #[serde(with = "crate::serde_complex")]
    pub z: Complex64,
    pub p: usize,
    pub n: usize,
    pub big_n: usize,
    pub law: EntryLaw,
    pub reps: usize,
    pub seed: u64,
}

impl Default for FDecompConfig {
    fn default() -> Self {
        Self {
            z: Complex64::new(1.0, 1.0),
            p: 50,
            n: 100,
            big_n: 200,
            law: EntryLaw::RealGaussian,
            reps: 100,
            seed: 20_240_602,
        }
    }
}

/// Both sides of the conditional decomposition for one realized spectrum of `S_y`.
///
/// With `y = p/(n-1)`, `a = m̲` driven by `F^{S_y⁻¹}` and `b = m̲` of the F-LSD at
/// `(p/(n-1), p/(N-1))`, subtracting the two fixed-point equations gives
///
/// ```text
/// p (a - b) = -y a b [tr(S_y + bI)⁻¹ - p m_{MP, p/(N-1)}(-b)]
///             / (1 - y ∫ a b dF^{S_y}(t) / ((t + a)(t + b)))
/// ```
///
/// and `p (m_a - m_b) = p (a - b)/y`. Returns
/// `(p (m_a - m_b), right-hand side / y)`.
pub fn f_decomposition_terms(
    z: Complex64,
    p: usize,
    n: usize,
    big_n: usize,
    sy_eigs: &[f64],
) -> Result<(Complex64, Complex64)> {
    if sy_eigs.len() != p {
        return Err(Error::DimensionMismatch(format!("{} eigenvalues for p = {p}", sy_eigs.len())));
    }
    let ratio = Ratio::centralized(p, n)?;
    let y = ratio.value;
    let y2 = Ratio::centralized(p, big_n)?.value;
    let emp = empirical_conditional_transform(z, ratio, sy_eigs, DEFAULT_TOL)?;
    let lsd = solve_model(&FMatrixModel::new(ratio, y2)?, z, DEFAULT_TOL)?;
    let pf = p as f64;
    let lhs = (emp.m - lsd.m) * pf;

    let (a, b) = (emp.m_under, lsd.m_under);
    let trace: Complex64 = sy_eigs.iter().map(|&t| 1.0 / (t + b)).sum();
    let mixed: Complex64 = sy_eigs.iter().map(|&t| a * b / ((t + a) * (t + b))).sum::<Complex64>() / pf;
    let numerator = -y * a * b * (trace - pf * mp_stieltjes(-b, y2)?);
    let rhs = numerator / (1.0 - y * mixed) / y;
    Ok((lhs, rhs))
}

/// Checks the decomposition identity on `reps` realized `S_y`.
pub fn verify_f_decomposition(cfg: &FDecompConfig) -> Result<VerifierReport> {
    if cfg.p + 1 > cfg.big_n {
        return Err(Error::DimensionMismatch(format!("need p <= N - 1, got p = {}, N = {}", cfg.p, cfg.big_n)));
    }
    if cfg.reps == 0 {
        return Err(Error::InvalidConfig("reps must be positive".into()));
    }
    let draws: Vec<(Complex64, Complex64, usize)> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let seed = derive_seed(cfg.seed, rep as u64);
            let mut attempt = 0;
            loop {
                let s = if attempt == 0 { seed } else { derive_seed(seed, attempt as u64) };
                let y = draw_entries(cfg.p, cfg.big_n, &cfg.law, s)?;
                let (_, eigs) = centralized_cov(&y, &PopulationShape::Identity)?;
                let max = eigs[0];
                let min = eigs[eigs.len() - 1];
                if !(min > 1e-10 * max) {
                    if attempt < MAX_RESAMPLES {
                        attempt += 1;
                        continue;
                    }
                    return Err(Error::SingularSy { min, norm: max });
                }
                let (lhs, rhs) = f_decomposition_terms(cfg.z, cfg.p, cfg.n, cfg.big_n, &eigs)?;
                return Ok((lhs, rhs, attempt));
            }
        })
        .collect::<Result<_>>()?;
    let k = draws.len() as f64;
    let mean: Complex64 = draws.iter().map(|d| d.0).sum::<Complex64>() / k;
    let max_gap = draws.iter().map(|d| (d.0 - d.1).norm()).fold(0.0, f64::max);
    let mse = draws.iter().map(|d| (d.0 - d.1).norm_sqr()).sum::<f64>() / k;
    let max_abs = draws.iter().map(|d| d.0.norm()).fold(0.0, f64::max);
    let checks = vec![
        Check::below(format!("max |LHS - RHS| over {} samples", cfg.reps), max_gap, IDENTITY_TOL),
        Check::below("max |LHS| (finite)", if max_abs.is_finite() { max_abs } else { f64::INFINITY }, f64::INFINITY),
    ];
    Ok(VerifierReport {
        lemma_id: "F".into(),
        n_values: vec![cfg.n],
        estimates: vec![NEstimate {
            n: cfg.n,
            p: cfg.p,
            mean,
            mse,
            mean_error: max_gap,
            reps: cfg.reps,
            resampled: draws.iter().map(|d| d.2).sum(),
        }],
        predicted_limit: mean,
        rate_ratios: Vec::new(),
        checks,
        pass: false,
        reps: cfg.reps,
        seed: cfg.seed,
    }
    .finalize())
}
