use num_complex::Complex64;

use super::report::{Check, NEstimate, VerifierReport};
use crate::error::{Error, Result};
use crate::stieltjes::{
    combined_correction_limit, finite_n_pair, shift_limit, CovarianceModel, Ratio, SpectralWeights, DEFAULT_TOL,
};

/// Accepted range of `e_{2n}/e_n` for first-order convergence.
pub const SHIFT_RATE_BAND: (f64, f64) = (0.25, 0.75);

/// Deterministic check that `p(m_n⁰ - m_{n-1}⁰)` converges to the shift limit
/// `L(z)` at rate `1/n`, with `p = round(y n)`. Also checks that `L` cancels
/// the combined-correction limit.
pub fn verify_shift(z: Complex64, y: f64, n_values: &[usize], h: &SpectralWeights) -> Result<VerifierReport> {
    if n_values.is_empty() {
        return Err(Error::InvalidConfig("need at least one n".into()));
    }
    let model = CovarianceModel::new(Ratio::limit(y)?, h.clone());
    let limit = shift_limit(z, &model, DEFAULT_TOL)?;
    let mut estimates = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let p = ((y * n as f64).round() as usize).max(1);
        let (m_n, m_n1) = finite_n_pair(z, p, n, h, DEFAULT_TOL)?;
        let value = (m_n - m_n1) * p as f64;
        let err = (value - limit).norm();
        estimates.push(NEstimate { n, p, mean: value, mse: err * err, mean_error: err, reps: 1, resampled: 0 });
    }
    let mut checks = Vec::new();
    let mut rate_ratios = Vec::new();
    for w in estimates.windows(2) {
        let r = w[1].mean_error / w[0].mean_error;
        rate_ratios.push(r);
        checks.push(Check::within(
            format!("error ratio n={}→{}", w[0].n, w[1].n),
            r,
            SHIFT_RATE_BAND.0,
            SHIFT_RATE_BAND.1,
        ));
    }
    let cancel = (limit + combined_correction_limit(z, &model, DEFAULT_TOL)?).norm();
    checks.push(Check::below("|L(z) + combined correction limit|", cancel, 1e-10));
    Ok(VerifierReport {
        lemma_id: "4.1".into(),
        n_values: n_values.to_vec(),
        estimates,
        predicted_limit: limit,
        rate_ratios,
        checks,
        pass: false,
        reps: 1,
        seed: 0,
    }
    .finalize())
}
