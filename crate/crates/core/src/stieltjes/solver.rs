use num_complex::Complex64;

use super::{CompanionValue, CovarianceModel, Ratio, SpectralModel, SpectralWeights};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_ITER: usize = 500;

/// Real evaluation points must keep this fraction of the support width away
/// from the support.
const REAL_AXIS_CLEARANCE: f64 = 1e-3;
const SINGULAR_DENOMINATOR: f64 = 1e-14;

/// `|z - (-1/m + y I₁(m))|`, plus the two population moments for reuse.
fn residual<M: SpectralModel + ?Sized>(
    model: &M,
    z: Complex64,
    y: f64,
    m: Complex64,
) -> Result<(f64, Complex64, Complex64)> {
    let (first, second) = model.population_moments(m)?;
    let r = (-1.0 / m + y * first - z).norm();
    Ok((if r.is_finite() { r } else { f64::INFINITY }, first, second))
}

fn finish<M: SpectralModel + ?Sized>(
    model: &M,
    z: Complex64,
    m_under: Complex64,
    residual: f64,
) -> Result<CompanionValue> {
    let ratio = model.ratio();
    let y = ratio.value;
    let m = if y == 0.0 { model.population_stieltjes(z)? } else { (m_under + (1.0 - y) / z) / y };
    Ok(CompanionValue { z, m_under, m, ratio, residual })
}

/// Off-axis solve: Newton steps guarded to stay in the correct half plane and
/// to decrease the residual, falling back to the plain fixed-point map
/// `m ← 1/(-z + y I₁(m))`, which maps ℂ⁺ into itself.
fn solve_off_axis<M: SpectralModel + ?Sized>(
    model: &M,
    z: Complex64,
    tol: f64,
    init: Complex64,
) -> Result<(Complex64, f64)> {
    debug_assert!(z.im > 0.0);
    let y = model.ratio().value;
    let mut m = if init.im > 0.0 && init.is_finite() { init } else { -1.0 / z };
    let (mut res, mut first, mut second) = residual(model, z, y, m)?;
    let mut best = (m, res);

    for _ in 0..MAX_ITER {
        if res <= tol {
            // One more Newton step usually takes the residual to rounding level.
            let deriv = 1.0 / (m * m) - y * second;
            let cand = m - (-1.0 / m + y * first - z) / deriv;
            if cand.im > 0.0 && cand.is_finite() {
                let (r2, _, _) = residual(model, z, y, cand)?;
                if r2 < res {
                    return Ok((cand, r2));
                }
            }
            return Ok((m, res));
        }
        let f = -1.0 / m + y * first - z;
        let deriv = 1.0 / (m * m) - y * second;
        let newton = m - f / deriv;
        let mut stepped = false;
        // Far jumps can lower the residual while leaving the basin, so Newton is
        // trusted only for steps short relative to |m|.
        if newton.im > 0.0 && newton.is_finite() && (newton - m).norm() <= 0.5 * m.norm() {
            let (r2, f2, s2) = residual(model, z, y, newton)?;
            if r2 < res {
                m = newton;
                res = r2;
                first = f2;
                second = s2;
                stepped = true;
            }
        }
        if !stepped {
            m = 1.0 / (-z + y * first);
            let (r2, f2, s2) = residual(model, z, y, m)?;
            res = r2;
            first = f2;
            second = s2;
        }
        if res < best.1 {
            best = (m, res);
        }
    }
    if best.1 <= tol {
        return Ok(best);
    }
    Err(Error::NonConvergence { z, best_residual: best.1 })
}

/// Off-axis solve with a fallback: if the direct attempt stalls (typically at
/// small `Im z` over the support), walk `Im z` down geometrically from
/// `max(1, |z|)`, seeding each step with the previous root.
fn solve_upper<M: SpectralModel + ?Sized>(
    model: &M,
    z: Complex64,
    tol: f64,
    init: Complex64,
) -> Result<(Complex64, f64)> {
    match solve_off_axis(model, z, tol, init) {
        Err(Error::NonConvergence { .. }) => {}
        other => return other,
    }
    let mut eta = z.norm().max(1.0);
    let mut m = -1.0 / Complex64::new(z.re, eta);
    loop {
        let e = eta.max(z.im);
        let (next, res) = solve_off_axis(model, Complex64::new(z.re, e), tol, m)?;
        if e == z.im {
            return Ok((next, res));
        }
        m = next;
        eta *= 0.3;
    }
}

/// Real-axis solve outside the support: continuation down from `z + iη`,
/// then Newton on the axis itself. The root must sit on the increasing
/// branch of `z(m̲)`.
fn solve_on_axis<M: SpectralModel + ?Sized>(model: &M, z: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    let y = model.ratio().value;
    let (lo, hi) = model.support();
    let width = (hi - lo).max(1e-12);
    let clearance = REAL_AXIS_CLEARANCE * width;
    let x = z.re;
    let invalid = || Error::InvalidPoint { z, lo, hi };
    if x == 0.0 || (x >= lo - clearance && x <= hi + clearance) {
        return Err(invalid());
    }

    let scale = x.abs().max(hi).max(1.0);
    let mut m = -1.0 / Complex64::new(x, scale);
    let mut eta = scale;
    while eta > 1e-9 * scale {
        let (mm, _) = solve_upper(model, Complex64::new(x, eta), tol, m)?;
        m = mm;
        eta *= 0.1;
    }

    let mut m = Complex64::new(m.re, 0.0);
    let mut best = (m, f64::INFINITY);
    for _ in 0..100 {
        let (first, second) = model.population_moments(m)?;
        let f = -1.0 / m + y * first - z;
        let res = f.norm();
        if res < best.1 {
            best = (m, res);
        }
        let deriv = 1.0 / (m * m) - y * second;
        if res <= tol * 1e-3 || deriv.norm() == 0.0 {
            break;
        }
        let next = Complex64::new((m - f / deriv).re, 0.0);
        if !next.is_finite() {
            break;
        }
        m = next;
    }
    let (m, res) = best;
    if res > tol {
        return Err(Error::NonConvergence { z, best_residual: res });
    }
    let (_, second) = model.population_moments(m)?;
    let slope = 1.0 / (m.re * m.re) - y * second.re;
    if !(slope > 0.0) {
        return Err(invalid());
    }
    Ok((m, res))
}

/// Solve for `m̲(z)` against an arbitrary [`SpectralModel`].
pub fn solve_model<M: SpectralModel + ?Sized>(model: &M, z: Complex64, tol: f64) -> Result<CompanionValue> {
    solve_model_from(model, z, tol, None)
}

/// As [`solve_model`], starting the iteration from `init` (must lie in the
/// same half plane as `z` to be used).
pub fn solve_model_from<M: SpectralModel + ?Sized>(
    model: &M,
    z: Complex64,
    tol: f64,
    init: Option<Complex64>,
) -> Result<CompanionValue> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    if !z.is_finite() {
        return Err(Error::InvalidPoint { z, lo: f64::NAN, hi: f64::NAN });
    }
    let y = model.ratio().value;
    if y == 0.0 {
        if z.norm() == 0.0 {
            return Err(Error::InvalidPoint { z, lo: 0.0, hi: 0.0 });
        }
        return finish(model, z, -1.0 / z, 0.0);
    }
    if z.im > 0.0 {
        let start = init.unwrap_or(-1.0 / z);
        let (m, res) = solve_upper(model, z, tol, start)?;
        finish(model, z, m, res)
    } else if z.im < 0.0 {
        let start = init.map(|c| c.conj()).unwrap_or(-1.0 / z.conj());
        let (m, res) = solve_upper(model, z.conj(), tol, start)?;
        finish(model, z, m.conj(), res)
    } else {
        let (m, res) = solve_on_axis(model, z, tol)?;
        finish(model, z, m, res)
    }
}

/// `m̲(z)` for ratio `ratio` and discrete population `h`.
pub fn solve_companion(z: Complex64, ratio: Ratio, h: &SpectralWeights, tol: f64) -> Result<CompanionValue> {
    let model = CovarianceModel::new(ratio, h.clone());
    solve_model(&model, z, tol)
}

pub fn solve_companion_from(
    z: Complex64,
    ratio: Ratio,
    h: &SpectralWeights,
    tol: f64,
    init: Complex64,
) -> Result<CompanionValue> {
    let model = CovarianceModel::new(ratio, h.clone());
    solve_model_from(&model, z, tol, Some(init))
}

/// `m̲'(z) = 1 / (1/m̲² - y ∫ t²/(1+t m̲)² dH)`.
pub fn companion_derivative<M: SpectralModel + ?Sized>(cv: &CompanionValue, model: &M) -> Result<Complex64> {
    let y = cv.ratio.value;
    let m = cv.m_under;
    let (_, second) = model.population_moments(m)?;
    let denom = 1.0 / (m * m) - y * second;
    if !(denom.norm() > SINGULAR_DENOMINATOR) {
        return Err(Error::NearSingular(denom.norm()));
    }
    Ok(1.0 / denom)
}

/// `g(z) = 1 + z m̲(z)` and `g'(z) = m̲ + z m̲'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GFactor {
    pub g: Complex64,
    pub g_prime: Complex64,
}

pub fn g_factor<M: SpectralModel + ?Sized>(cv: &CompanionValue, model: &M) -> Result<GFactor> {
    let deriv = companion_derivative(cv, model)?;
    Ok(GFactor { g: 1.0 + cv.z * cv.m_under, g_prime: cv.m_under + cv.z * deriv })
}

/// Limit of `p(m_n⁰ - m_{n-1}⁰)`: `(1 + z m̲)(m̲ + z m̲')/(z m̲)`.
pub fn shift_limit<M: SpectralModel + ?Sized>(z: Complex64, model: &M, tol: f64) -> Result<Complex64> {
    let cv = solve_model(model, z, tol)?;
    let gf = g_factor(&cv, model)?;
    Ok(gf.g * gf.g_prime / (z * cv.m_under))
}

/// Limit of the three correction traces coming from the rank-one centring
/// term: `(m̲ + z m̲')(1 + z m̲)/(-z m̲)`. Exactly `-shift_limit`.
pub fn combined_correction_limit<M: SpectralModel + ?Sized>(z: Complex64, model: &M, tol: f64) -> Result<Complex64> {
    let cv = solve_model(model, z, tol)?;
    let gf = g_factor(&cv, model)?;
    Ok(gf.g_prime * gf.g / (-z * cv.m_under))
}

/// `(m_n⁰(z), m_{n-1}⁰(z))`: transforms at the finite ratios `p/n` and `p/(n-1)`.
pub fn finite_n_pair(
    z: Complex64,
    p: usize,
    n: usize,
    h_p: &SpectralWeights,
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    let at_n = solve_companion(z, Ratio::new(p, n)?, h_p, tol)?;
    let at_n1 = solve_companion(z, Ratio::centralized(p, n)?, h_p, tol)?;
    Ok((at_n.m, at_n1.m))
}

/// Integrand of the additional bias term for the centralized matrix proposed
/// in earlier work on this problem:
///
/// ```text
/// P(z) = y m̲ ∫ t dH/(1+t m̲)²  /  ( z (1 - y ∫ m̲² t² dH/(1+t m̲)²) )
/// ```
pub fn pan_integrand(z: Complex64, model: &CovarianceModel, tol: f64) -> Result<Complex64> {
    let y = model.ratio().value;
    let cv = solve_model(model, z, tol)?;
    let m = cv.m_under;
    let h = model.population();
    let linear: Complex64 = h.integrate(|t| {
        let d = 1.0 + t * m;
        t / (d * d)
    });
    let quad: Complex64 = h.integrate(|t| {
        let d = 1.0 + t * m;
        m * m * t * t / (d * d)
    });
    let denom = z * (1.0 - y * quad);
    if !(denom.norm() > SINGULAR_DENOMINATOR) {
        return Err(Error::NearSingular(denom.norm()));
    }
    Ok(y * m * linear / denom)
}
