use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TestFunction;
use crate::error::Result;
use crate::stieltjes::{
    density_integral, invert_density, pan_integrand, shift_limit, solve_model, Contour, ContourOptions,
    CovarianceModel, Ratio, SpectralModel, SpectralWeights, DEFAULT_EPS_SCHEDULE, DEFAULT_TOL,
};

/// Stopping tolerance of the contour route. Centering differences are
/// multiplied by `p`, so this sits well below the default quadrature tolerance.
pub const CENTERING_TOL: f64 = 1e-13;
const HALF_HEIGHT: f64 = 0.5;
const DENSITY_GRID: usize = 512;
const DENSITY_NODES: usize = 2048;

/// `∫ f dF` by both routes. `contour` is authoritative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenteringIntegral {
    pub contour: f64,
    pub density: Option<f64>,
}

impl CenteringIntegral {
    pub fn value(&self) -> f64 {
        self.contour
    }

    pub fn route_gap(&self) -> Option<f64> {
        self.density.map(|d| (d - self.contour).abs())
    }
}

fn contour_for<M: SpectralModel + ?Sized>(f: &TestFunction, model: &M) -> Result<Contour> {
    let (lo, hi) = model.support();
    let atom = model.atom_at_zero();
    f.check_admissible(lo, atom)?;
    if f.has_branch_at_origin() {
        return Contour::excluding_origin((lo, hi), HALF_HEIGHT);
    }
    let mut c = Contour::around((lo, hi), HALF_HEIGHT);
    if atom > 0.0 {
        // Enclose the atom at the origin as well.
        c.left = c.left.min(-0.1 * (hi - lo));
    }
    Ok(c)
}

fn contour_options(f: &TestFunction) -> ContourOptions {
    ContourOptions { tol: CENTERING_TOL, branch_at_origin: f.has_branch_at_origin(), ..ContourOptions::default() }
}

/// `∫ f dF = -(1/2πi) ∮ f(z) m(z) dz` around the support.
fn contour_route<M: SpectralModel + ?Sized>(f: &TestFunction, model: &M) -> Result<f64> {
    let contour = contour_for(f, model)?;
    let total =
        contour.integrate(|z| Ok(f.eval_complex(z) * solve_model(model, z, DEFAULT_TOL)?.m), &contour_options(f))?;
    Ok((-total / Complex64::new(0.0, 2.0 * PI)).re)
}

/// Centering integral by the contour route only.
pub fn centering_integral<M: SpectralModel + ?Sized>(f: &TestFunction, model: &M) -> Result<f64> {
    contour_route(f, model)
}

/// Centering integral with the density-quadrature cross-check when
/// `cross_check` is set.
pub fn centering_integral_with<M: SpectralModel + ?Sized>(
    f: &TestFunction,
    model: &M,
    cross_check: bool,
) -> Result<CenteringIntegral> {
    let contour = contour_route(f, model)?;
    let density = if cross_check {
        let grid = invert_density(model, DENSITY_GRID, DEFAULT_EPS_SCHEDULE)?;
        Some(density_integral(model, &grid, |x| f.eval(x), DENSITY_NODES, DEFAULT_EPS_SCHEDULE)?)
    } else {
        None
    };
    Ok(CenteringIntegral { contour, density })
}

/// Offset between the two centering conventions for a covariance statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenteringGap {
    /// `p (∫ f dF^{p/(n-1), H_p} - ∫ f dF^{p/n, H_p})`
    pub finite: f64,
    /// `(1/2πi) ∮ f(z) L(z) dz` at `y = p/n`, the large-`n` value of `finite`.
    pub limit: f64,
    /// `(1/2πi) ∮ f(z) P(z) dz` for the alternative bias integrand, reported
    /// for comparison only.
    pub pan: f64,
}

pub fn deterministic_centering_gap(
    f: &TestFunction,
    p: usize,
    n: usize,
    h_p: &SpectralWeights,
) -> Result<CenteringGap> {
    let right = CovarianceModel::new(Ratio::centralized(p, n)?, h_p.clone());
    let wrong = CovarianceModel::new(Ratio::new(p, n)?, h_p.clone());
    let finite = p as f64 * (centering_integral(f, &right)? - centering_integral(f, &wrong)?);

    let contour = contour_for(f, &wrong)?;
    let opts = contour_options(f);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let limit = contour.integrate(|z| Ok(f.eval_complex(z) * shift_limit(z, &wrong, DEFAULT_TOL)?), &opts)?;
    let pan = contour.integrate(|z| Ok(f.eval_complex(z) * pan_integrand(z, &wrong, DEFAULT_TOL)?), &opts)?;
    Ok(CenteringGap { finite, limit: (limit / two_pi_i).re, pan: (pan / two_pi_i).re })
}
