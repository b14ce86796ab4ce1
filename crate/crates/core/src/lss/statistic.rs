use serde::{Deserialize, Serialize};

use super::{centering_integral, TestFunction};
use crate::ensembles::{FPair, MatrixSample};
use crate::error::{Error, Result};
use crate::stieltjes::{CovarianceModel, FMatrixModel, Ratio, SpectralModel, SpectralWeights};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticKind {
    /// Covariance statistic `Σ f(λ_i(S or B)) - p ∫ f dF^{y, H_p}`.
    Xp,
    /// F-matrix statistic `Σ f(λ_i(F or G)) - p ∫ f dF_{(y₁, y₂)}`.
    Wp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LssValue {
    pub value: f64,
    pub statistic: StatisticKind,
    /// `[y]` for covariance statistics, `[y₁, y₂]` for F-matrix ones.
    pub centering_ratios: Vec<f64>,
    pub f: TestFunction,
}

/// `Σ f(λ_i)`.
pub fn linear_statistic(eigs: &[f64], f: &TestFunction) -> Result<f64> {
    if f.has_branch_at_origin() {
        if let Some(v) = eigs.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::NotAdmissible(format!("log of eigenvalue {v:e}")));
        }
    }
    Ok(eigs.iter().map(|&x| f.eval(x)).sum())
}

/// Covariance model centering a statistic of a `p × n` sample: ratio
/// `p/(n-1)` when `centralized`, `p/n` otherwise.
pub fn covariance_model(p: usize, n: usize, h_p: SpectralWeights, centralized: bool) -> Result<CovarianceModel> {
    let ratio = if centralized { Ratio::centralized(p, n)? } else { Ratio::new(p, n)? };
    Ok(CovarianceModel::new(ratio, h_p))
}

/// F-matrix model at `(p/(n-1), p/(N-1))` when `centralized`, `(p/n, p/N)` otherwise.
pub fn f_matrix_model(p: usize, n: usize, big_n: usize, centralized: bool) -> Result<FMatrixModel> {
    let (y1, y2) = if centralized {
        (Ratio::centralized(p, n)?, Ratio::centralized(p, big_n)?)
    } else {
        (Ratio::new(p, n)?, Ratio::new(p, big_n)?)
    };
    FMatrixModel::new(y1, y2.value)
}

pub fn lss_covariance(sample: &MatrixSample, f: &TestFunction, use_centralized: bool) -> Result<LssValue> {
    let model = covariance_model(sample.p, sample.n, sample.shape.spectrum(sample.p)?, use_centralized)?;
    let eigs = if use_centralized { &sample.eigs_s } else { &sample.eigs_b };
    let center = centering_integral(f, &model)?;
    Ok(LssValue {
        value: linear_statistic(eigs, f)? - sample.p as f64 * center,
        statistic: StatisticKind::Xp,
        centering_ratios: vec![model.ratio().value],
        f: f.clone(),
    })
}

pub fn lss_f_matrix(pair: &FPair, f: &TestFunction, use_centralized: bool) -> Result<LssValue> {
    let p = pair.sample_x.p;
    let model = f_matrix_model(p, pair.sample_x.n, pair.sample_y.n, use_centralized)?;
    let eigs = if use_centralized { &pair.eigs_f } else { &pair.eigs_g };
    let center = centering_integral(f, &model)?;
    Ok(LssValue {
        value: linear_statistic(eigs, f)? - p as f64 * center,
        statistic: StatisticKind::Wp,
        centering_ratios: vec![model.ratio().value, model.y2()],
        f: f.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{build_f_pair, draw_entries, EntryLaw, PopulationShape};

    #[test]
    fn trace_statistic_is_trace_minus_p() {
        let smp = MatrixSample::draw(10, 30, &EntryLaw::RealGaussian, &PopulationShape::Identity, 1).unwrap();
        let v = lss_covariance(&smp, &TestFunction::monomial(1).unwrap(), true).unwrap();
        let tr: f64 = smp.s.trace().re;
        assert!((v.value - (tr - 10.0)).abs() < 1e-10);
        assert_eq!(v.centering_ratios, vec![10.0 / 29.0]);
    }

    #[test]
    fn linear_in_f() {
        let smp = MatrixSample::draw(8, 20, &EntryLaw::RealGaussian, &PopulationShape::Identity, 2).unwrap();
        let f1 = TestFunction::polynomial(vec![0.5, -1.0, 2.0]).unwrap();
        let f2 = TestFunction::polynomial(vec![1.0, 0.0, 0.0, 0.3]).unwrap();
        let sum = TestFunction::polynomial(vec![1.5, -1.0, 2.0, 0.3]).unwrap();
        let a = lss_covariance(&smp, &f1, true).unwrap().value;
        let b = lss_covariance(&smp, &f2, true).unwrap().value;
        let c = lss_covariance(&smp, &sum, true).unwrap().value;
        assert!((a + b - c).abs() < 1e-10);
    }

    #[test]
    fn degenerate_f_pair_is_finite() {
        let x = draw_entries(5, 20, &EntryLaw::RealGaussian, 3).unwrap();
        let pair = build_f_pair(x.clone(), x, &PopulationShape::Identity, (3, 3)).unwrap();
        let v = lss_f_matrix(&pair, &TestFunction::Log, false).unwrap();
        assert!(v.value.is_finite());
        assert_eq!(v.statistic, StatisticKind::Wp);
    }
}
