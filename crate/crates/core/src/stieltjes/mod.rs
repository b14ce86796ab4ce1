//! Deterministic complex-analytic kernel.
//!
//! Everything here is a pure function of its inputs. The central object is the
//! companion Stieltjes transform `m̲(z)` of a sample-covariance-type limiting
//! spectral distribution, characterised as the unique upper-half-plane root of
//!
//! ```text
//! z = -1/m̲ + y ∫ t / (1 + t m̲) dH(t)
//! ```
//!
//! [`SpectralModel`] abstracts the population measure `H` so the same solver,
//! density inversion and contour machinery serve the covariance case
//! ([`CovarianceModel`], `H` discrete) and the F-matrix case ([`FMatrixModel`],
//! `H` the law of `1/λ` with `λ` Marchenko–Pastur).

mod contour;
mod density;
mod fmatrix;
mod mp;
mod solver;
mod support;
mod weights;

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use contour::{contour_integrate, Contour, ContourOptions};
pub use density::{density_at, density_integral, invert_density, GridDensity, DEFAULT_EPS_SCHEDULE};
pub use fmatrix::{empirical_conditional_transform, f_lsd_transform, f_support, FMatrixModel};
pub use mp::{mp_quadratic, mp_stieltjes, mp_stieltjes_derivative};
pub use solver::{
    combined_correction_limit, companion_derivative, finite_n_pair, g_factor, pan_integrand, shift_limit,
    solve_companion, solve_companion_from, solve_model, solve_model_from, GFactor, DEFAULT_TOL, MAX_ITER,
};
pub use support::discrete_support_hull;
pub use weights::SpectralWeights;

/// Dimension-to-sample-size ratio.
///
/// Finite ratios remember the `(p, n)` they came from. The centralized ratio of
/// a pair is `p/(n-1)`, stored as `(p, n-1)` so `value == p/n` always holds for
/// the stored fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub p: Option<usize>,
    pub n: Option<usize>,
    pub value: f64,
}

impl Ratio {
    pub fn new(p: usize, n: usize) -> Result<Self> {
        if p == 0 || n == 0 {
            return Err(Error::InvalidRatio(format!("p = {p}, n = {n} must be positive")));
        }
        Ok(Self { p: Some(p), n: Some(n), value: p as f64 / n as f64 })
    }

    /// `p/(n-1)`, the ratio used to centre statistics of the centralized matrix.
    pub fn centralized(p: usize, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidRatio(format!("centralized ratio needs n >= 2, got {n}")));
        }
        Self::new(p, n - 1)
    }

    /// A limiting ratio. `y = 0` is accepted as the degenerate limit in which
    /// the transform collapses to `-1/z`.
    pub fn limit(y: f64) -> Result<Self> {
        if !(y.is_finite() && y >= 0.0) {
            return Err(Error::InvalidRatio(format!("y = {y} must be finite and >= 0")));
        }
        Ok(Self { p: None, n: None, value: y })
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

/// A solved companion transform value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompanionValue {
    #[serde(with = "crate::serde_complex")]
    pub z: Complex64,
    /// `m̲(z)`
    #[serde(with = "crate::serde_complex")]
    pub m_under: Complex64,
    /// `m(z)`, recovered through `m̲ = -(1-y)/z + y m`.
    #[serde(with = "crate::serde_complex")]
    pub m: Complex64,
    pub ratio: Ratio,
    pub residual: f64,
}

/// The population side of the fixed-point equation.
pub trait SpectralModel: Sync {
    fn ratio(&self) -> Ratio;

    /// Returns `(∫ t/(1+t m) dH, ∫ t²/(1+t m)² dH)`.
    fn population_moments(&self, m: Complex64) -> Result<(Complex64, Complex64)>;

    /// `∫ dH(t)/(t - z)`, the transform of the LSD in the `y = 0` limit.
    fn population_stieltjes(&self, z: Complex64) -> Result<Complex64>;

    /// Hull `[lo, hi]` of the support of the continuous part of the LSD.
    fn support(&self) -> (f64, f64);

    /// Mass of the LSD at the origin, `max(0, 1 - 1/y)`.
    fn atom_at_zero(&self) -> f64 {
        let y = self.ratio().value;
        if y > 1.0 {
            1.0 - 1.0 / y
        } else {
            0.0
        }
    }
}

/// Sample covariance model with a discrete population spectrum.
#[derive(Debug)]
pub struct CovarianceModel {
    ratio: Ratio,
    h: SpectralWeights,
    support: OnceLock<(f64, f64)>,
}

impl Clone for CovarianceModel {
    fn clone(&self) -> Self {
        let support = OnceLock::new();
        if let Some(s) = self.support.get() {
            let _ = support.set(*s);
        }
        Self { ratio: self.ratio, h: self.h.clone(), support }
    }
}

impl CovarianceModel {
    pub fn new(ratio: Ratio, h: SpectralWeights) -> Self {
        Self { ratio, h, support: OnceLock::new() }
    }

    /// Marchenko–Pastur: `H = δ₁`.
    pub fn marchenko_pastur(y: f64) -> Result<Self> {
        Ok(Self::new(Ratio::limit(y)?, SpectralWeights::point_mass(1.0)?))
    }

    pub fn population(&self) -> &SpectralWeights {
        &self.h
    }
}

impl SpectralModel for CovarianceModel {
    fn ratio(&self) -> Ratio {
        self.ratio
    }

    fn population_moments(&self, m: Complex64) -> Result<(Complex64, Complex64)> {
        let mut first = Complex64::new(0.0, 0.0);
        let mut second = Complex64::new(0.0, 0.0);
        for (t, w) in self.h.iter() {
            let q = t / (1.0 + t * m);
            first += q * w;
            second += q * q * w;
        }
        Ok((first, second))
    }

    fn population_stieltjes(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.h.integrate(|t| 1.0 / (t - z)))
    }

    fn support(&self) -> (f64, f64) {
        *self.support.get_or_init(|| discrete_support_hull(self.ratio.value, &self.h))
    }
}
