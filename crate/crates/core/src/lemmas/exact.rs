use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Check, NEstimate, VerifierReport};
use crate::ensembles::{hermitian_eigs, EntryLaw, MatrixSample, PopulationShape};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// `‖S - (B - Δ)‖ / ‖B‖` (Frobenius).
pub fn decomposition_error(sample: &MatrixSample) -> f64 {
    (&sample.s - (&sample.b - &sample.delta)).norm() / sample.b.norm()
}

fn inverse(m: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let scale = m.norm();
    m.try_inverse().ok_or(Error::SingularResolvent(scale))
}

/// Relative error of
/// `(A-Δ)⁻¹ = A⁻¹ + A⁻¹ΔA⁻¹ + A⁻¹(ΔA⁻¹)² + (A-Δ)⁻¹(ΔA⁻¹)³` with dense inverses,
/// where `A = B - zI` and `A - Δ = S - zI`.
pub fn resolvent_expansion_error(sample: &MatrixSample, z: Complex64) -> Result<f64> {
    let id = DMatrix::<Complex64>::identity(sample.p, sample.p);
    let a_inv = inverse(&sample.b - &id * z)?;
    let m_inv = inverse(&sample.s - &id * z)?;
    let da = &sample.delta * &a_inv;
    let da2 = &da * &da;
    let rhs = &a_inv + &a_inv * &da + &a_inv * &da2 + &m_inv * &da2 * &da;
    Ok((&m_inv - rhs).norm() / m_inv.norm())
}

/// `tr A⁻¹Δ` when the columns sum to zero, where `Δ = -B/(n-1)`:
/// `-(1/(n-1)) Σ λ_i/(λ_i - z)`.
pub fn trace_delta_zero_mean(eigs_b: &[f64], z: Complex64, n: usize) -> Complex64 {
    let scale = -1.0 / (n as f64 - 1.0);
    eigs_b.iter().map(|&l| l / (l - z)).sum::<Complex64>() * scale
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterlacingCheck {
    /// Indices violating `λ_{i+1} ≤ μ_i ≤ λ_i` beyond the slack.
    pub violations: usize,
    pub max_violation: f64,
    /// `Σ (λ_i - μ_i)`
    pub trace_gap: f64,
    /// `λ₁ - μ_p`
    pub trace_bound: f64,
    pub pass: bool,
}

/// Interlacing of `λ = eig(B)` and `μ = eig(B - ȳȳ*)` (both descending),
/// plus the trace bound `Σ(λ_i - μ_i) ≤ λ₁ - μ_p`.
pub fn interlacing_details(sample: &MatrixSample) -> Result<InterlacingCheck> {
    let lam = &sample.eigs_b;
    let mu = hermitian_eigs(&sample.downdated())?;
    let slack = 1e-10 * lam.first().copied().unwrap_or(0.0).abs().max(1.0);
    let mut violations = 0;
    let mut max_violation: f64 = 0.0;
    for i in 0..mu.len() {
        let upper = mu[i] - lam[i];
        let lower = if i + 1 < lam.len() { lam[i + 1] - mu[i] } else { f64::NEG_INFINITY };
        let worst = upper.max(lower);
        if worst > slack {
            violations += 1;
        }
        max_violation = max_violation.max(worst);
    }
    let trace_gap: f64 = lam.iter().zip(&mu).map(|(l, m)| l - m).sum();
    let trace_bound = lam[0] - mu[mu.len() - 1];
    let pass = violations == 0 && trace_gap <= trace_bound + slack;
    Ok(InterlacingCheck { violations, max_violation, trace_gap, trace_bound, pass })
}

pub fn verify_interlacing(sample: &MatrixSample) -> bool {
    interlacing_details(sample).map(|c| c.pass).unwrap_or(false)
}

/// Exact-identity sweep over `reps` samples: the `S = B - Δ` decomposition
/// and resolvent expansion on the first `min(reps, 100)` draws, interlacing
/// and the trace bound on all of them.
pub fn verify_exact_suite(
    p: usize,
    n: usize,
    law: &EntryLaw,
    z: Complex64,
    reps: usize,
    seed: u64,
) -> Result<VerifierReport> {
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be positive".into()));
    }
    let dense_reps = reps.min(100);
    let results: Vec<(f64, f64, InterlacingCheck)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let smp = MatrixSample::draw(p, n, law, &PopulationShape::Identity, derive_seed(seed, rep as u64))?;
            let (decomp, expansion) = if rep < dense_reps {
                (decomposition_error(&smp), resolvent_expansion_error(&smp, z)?)
            } else {
                (0.0, 0.0)
            };
            Ok((decomp, expansion, interlacing_details(&smp)?))
        })
        .collect::<Result<_>>()?;
    let max_decomp = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_expansion = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let violations: usize = results.iter().map(|r| r.2.violations).sum();
    let trace_failures = results.iter().filter(|r| r.2.trace_gap > r.2.trace_bound + 1e-10).count();
    let checks = vec![
        Check::below(format!("max ‖S-(B-Δ)‖/‖B‖ over {dense_reps} samples"), max_decomp, 1e-10),
        Check::below(format!("max resolvent expansion error over {dense_reps} samples"), max_expansion, 1e-10),
        Check::below(format!("interlacing violations over {reps} samples"), violations as f64, 0.5),
        Check::below(format!("trace bound failures over {reps} samples"), trace_failures as f64, 0.5),
    ];
    let mean_gap = results.iter().map(|r| r.2.trace_gap).sum::<f64>() / reps as f64;
    Ok(VerifierReport {
        lemma_id: "interlacing".into(),
        n_values: vec![n],
        estimates: vec![NEstimate {
            n,
            p,
            mean: Complex64::new(mean_gap, 0.0),
            mse: 0.0,
            mean_error: 0.0,
            reps,
            resampled: 0,
        }],
        predicted_limit: Complex64::new(0.0, 0.0),
        rate_ratios: Vec::new(),
        checks,
        pass: false,
        reps,
        seed,
    }
    .finalize())
}
