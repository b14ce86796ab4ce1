use num_complex::Complex64;

use super::mp::{mp_stieltjes, mp_stieltjes_derivative};
use super::{solve_model, CompanionValue, CovarianceModel, Ratio, SpectralModel, SpectralWeights};
use crate::error::{Error, Result};

/// Support hull of the continuous part of the F-matrix LSD:
/// `((1-h)²/(1-y₂)², (1+h)²/(1-y₂)²)` with `h = √(y₁ + y₂ - y₁y₂)`.
pub fn f_support(y1: f64, y2: f64) -> Result<(f64, f64)> {
    if !(y1.is_finite() && y1 >= 0.0) {
        return Err(Error::InvalidRatio(format!("y1 = {y1} must be finite and >= 0")));
    }
    if !(0.0..1.0).contains(&y2) {
        return Err(Error::InvalidRatio(format!("y2 = {y2} must lie in [0, 1)")));
    }
    let h = (y1 + y2 - y1 * y2).sqrt();
    let d = (1.0 - y2) * (1.0 - y2);
    Ok(((1.0 - h) * (1.0 - h) / d, (1.0 + h) * (1.0 + h) / d))
}

/// LSD of `S_x S_y⁻¹`: a covariance model whose population is the law of
/// `1/λ` with `λ ~ MP(y₂)`. The population integrals reduce to the MP
/// transform at `-m̲`:
///
/// ```text
/// ∫ t/(1+t m̲) dH = ∫ dF_{y₂}(λ)/(λ + m̲) = m_{MP}(-m̲)
/// ```
#[derive(Clone, Copy, Debug)]
pub struct FMatrixModel {
    y1: Ratio,
    y2: f64,
    support: (f64, f64),
}

impl FMatrixModel {
    pub fn new(y1: Ratio, y2: f64) -> Result<Self> {
        let support = f_support(y1.value, y2)?;
        Ok(Self { y1, y2, support })
    }

    pub fn from_limits(y1: f64, y2: f64) -> Result<Self> {
        Self::new(Ratio::limit(y1)?, y2)
    }

    pub fn y2(&self) -> f64 {
        self.y2
    }
}

impl SpectralModel for FMatrixModel {
    fn ratio(&self) -> Ratio {
        self.y1
    }

    fn population_moments(&self, m: Complex64) -> Result<(Complex64, Complex64)> {
        let w = -m;
        let first = mp_stieltjes(w, self.y2)?;
        if w.im != 0.0 && first.im * w.im < 0.0 {
            return Err(Error::BranchError(w));
        }
        let second = mp_stieltjes_derivative(w, first, self.y2);
        Ok((first, second))
    }

    fn population_stieltjes(&self, z: Complex64) -> Result<Complex64> {
        // ∫ dF(λ)/(1/λ - z) = -(1/z)(1 + (1/z) m_MP(1/z))
        let inv = 1.0 / z;
        Ok(-inv * (1.0 + inv * mp_stieltjes(inv, self.y2)?))
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }
}

/// Companion transform of the F-matrix LSD at `(y₁, y₂)`.
pub fn f_lsd_transform(z: Complex64, y1: f64, y2: f64, tol: f64) -> Result<Complex64> {
    let model = FMatrixModel::from_limits(y1, y2)?;
    Ok(solve_model(&model, z, tol)?.m_under)
}

/// Companion transform driven by a realized `S_y`: solves
/// `z = -1/m̲ + y (1/p) Σ 1/(t_i + m̲)` over the eigenvalues `t_i` of `S_y`,
/// i.e. the covariance equation with population `F^{S_y⁻¹}`.
pub fn empirical_conditional_transform(
    z: Complex64,
    ratio: Ratio,
    sy_eigs: &[f64],
    tol: f64,
) -> Result<CompanionValue> {
    if let Some(t) = sy_eigs.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::SingularInput(*t));
    }
    let h = SpectralWeights::empirical(sy_eigs)?.reciprocal()?;
    let model = CovarianceModel::new(ratio, h);
    solve_model(&model, z, tol)
}
