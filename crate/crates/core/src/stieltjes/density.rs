use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{solve_model_from, SpectralModel, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Continuation schedule for `ε` in `Im m(x + iε)/π`.
pub const DEFAULT_EPS_SCHEDULE: &[f64] = &[1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Density values below this count as zero when locating support edges.
const EDGE_THRESHOLD: f64 = 1e-6;

/// A limiting spectral density tabulated on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    pub support_lo: f64,
    pub support_hi: f64,
    pub xs: Vec<f64>,
    pub density: Vec<f64>,
    pub atom_at_zero: f64,
}

impl GridDensity {
    /// Trapezoid integral of the continuous part plus the atom.
    pub fn total_mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    /// Trapezoid integral of `f · density` plus `f(0)` times the atom.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let continuous: f64 = self
            .xs
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, d)| 0.5 * (x[1] - x[0]) * (f(x[0]) * d[0] + f(x[1]) * d[1]))
            .sum();
        let atom = if self.atom_at_zero > 0.0 { self.atom_at_zero * f(0.0) } else { 0.0 };
        continuous + atom
    }
}

/// Density of the continuous part at real `x`.
///
/// `m̲` is continued down the `ε` schedule from `x + iε₀`; the last value seeds
/// a Newton polish directly on the axis, which lands on the boundary value
/// `lim_{ε→0} m(x+iε)`. If the polish does not reach the solver tolerance the
/// value at the final `ε` is used.
pub fn density_at<M: SpectralModel + ?Sized>(model: &M, x: f64, eps_schedule: &[f64]) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let y = model.ratio().value;
    if y == 0.0 {
        return Err(Error::InvalidRatio("density inversion needs y > 0".into()));
    }
    let mut m_under: Option<Complex64> = None;
    for &eps in eps_schedule {
        let cv = solve_model_from(model, Complex64::new(x, eps), DEFAULT_TOL, m_under)?;
        m_under = Some(cv.m_under);
    }
    let start = m_under.unwrap_or_else(|| -1.0 / Complex64::new(x, 1e-6));
    let z = Complex64::new(x, 0.0);
    let m_under = polish_on_axis(model, z, start).unwrap_or(start);
    let m = (m_under + (1.0 - y) / z) / y;
    // Off the support the polish lands on a real root up to rounding, which
    // is relative to |m| (large near the origin).
    Ok(if m.im > 1e-10 * m.norm().max(1.0) { m.im / std::f64::consts::PI } else { 0.0 })
}

fn polish_on_axis<M: SpectralModel + ?Sized>(model: &M, z: Complex64, start: Complex64) -> Option<Complex64> {
    let y = model.ratio().value;
    let mut m = start;
    let mut residual = f64::INFINITY;
    for _ in 0..80 {
        let (first, second) = model.population_moments(m).ok()?;
        let f = -1.0 / m + y * first - z;
        residual = f.norm();
        let deriv = 1.0 / (m * m) - y * second;
        let step = f / deriv;
        let next = m - step;
        if !next.is_finite() {
            return None;
        }
        // Stay on the closed upper half plane.
        m = if next.im < 0.0 { Complex64::new(next.re, -next.im) } else { next };
        // The residual alone is not enough: where the derivative is small a
        // tiny residual still allows a large error in m.
        if step.norm() <= 1e-13 * m.norm().max(1.0) {
            return Some(m);
        }
    }
    (residual <= DEFAULT_TOL).then_some(m)
}

/// Tabulate the density on `grid_size` points covering the support hull with
/// a 10% margin, then locate the edges where the density crosses `1e-6`.
pub fn invert_density<M: SpectralModel + ?Sized>(
    model: &M,
    grid_size: usize,
    eps_schedule: &[f64],
) -> Result<GridDensity> {
    if grid_size < 256 {
        return Err(Error::InvalidConfig(format!("grid_size must be >= 256, got {grid_size}")));
    }
    match eps_schedule.last() {
        Some(&e) if e >= 1e-6 => {}
        _ => return Err(Error::InvalidConfig("eps schedule must be nonempty and end >= 1e-6".into())),
    }
    let (lo, hi) = model.support();
    let atom = model.atom_at_zero();
    let margin = 0.1 * (hi - lo);
    let mut left = lo - margin;
    if atom > 0.0 {
        left = left.max(0.5 * lo);
    }
    let right = hi + margin;
    let step = (right - left) / (grid_size - 1) as f64;
    let xs: Vec<f64> = (0..grid_size).map(|i| left + step * i as f64).collect();
    let density = xs.iter().map(|&x| density_at(model, x, eps_schedule)).collect::<Result<Vec<f64>>>()?;

    let above = |d: f64| d > EDGE_THRESHOLD;
    let first = density.iter().position(|&d| above(d));
    let last = density.iter().rposition(|&d| above(d));
    let (support_lo, support_hi) = match (first, last) {
        (Some(i), Some(j)) => {
            let lo_edge = if i == 0 { xs[0] } else { refine_edge(model, eps_schedule, xs[i - 1], xs[i], true)? };
            let hi_edge =
                if j + 1 == xs.len() { xs[j] } else { refine_edge(model, eps_schedule, xs[j], xs[j + 1], false)? };
            (lo_edge, hi_edge)
        }
        _ => (lo, hi),
    };
    Ok(GridDensity { support_lo, support_hi, xs, density, atom_at_zero: atom })
}

/// Bisection for the threshold crossing between `a` and `b`. `rising` means the
/// density is below threshold at `a` and above at `b`.
fn refine_edge<M: SpectralModel + ?Sized>(model: &M, eps: &[f64], mut a: f64, mut b: f64, rising: bool) -> Result<f64> {
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        let inside = density_at(model, mid, eps)? > EDGE_THRESHOLD;
        if inside == rising {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// `∫ f dF` by quadrature of the inverted density over `[grid.support_lo,
/// grid.support_hi]`, using the substitution `x = lo + (hi-lo)(1-cos θ)/2` and
/// the trapezoid rule in `θ`. The substitution absorbs square-root edges, so
/// convergence is fast for single-interval supports. The atom at zero is added
/// as `f(0)` times its weight.
pub fn density_integral<M: SpectralModel + ?Sized>(
    model: &M,
    grid: &GridDensity,
    f: impl Fn(f64) -> f64,
    nodes: usize,
    eps_schedule: &[f64],
) -> Result<f64> {
    let (lo, hi) = (grid.support_lo, grid.support_hi);
    let half = 0.5 * (hi - lo);
    let dtheta = std::f64::consts::PI / nodes as f64;
    let mut acc = 0.0;
    // Endpoint terms vanish with sin θ.
    for k in 1..nodes {
        let theta = dtheta * k as f64;
        let x = lo + half * (1.0 - theta.cos());
        let d = density_at(model, x, eps_schedule)?;
        acc += f(x) * d * half * theta.sin();
    }
    let mut total = acc * dtheta;
    if grid.atom_at_zero > 0.0 {
        total += grid.atom_at_zero * f(0.0);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stieltjes::CovarianceModel;

    #[test]
    fn marchenko_pastur_density_is_normalised() {
        let model = CovarianceModel::marchenko_pastur(0.5).unwrap();
        let grid = invert_density(&model, 4096, DEFAULT_EPS_SCHEDULE).unwrap();
        assert!((grid.total_mass() - 1.0).abs() < 1e-4, "{}", grid.total_mass());
        let s = 0.5f64.sqrt();
        assert!((grid.support_lo - (1.0 - s).powi(2)).abs() < 1e-6);
        assert!((grid.support_hi - (1.0 + s).powi(2)).abs() < 1e-6);
        for (x, d) in grid.xs.iter().zip(&grid.density) {
            assert!(*d >= 0.0);
            if *x < grid.support_lo || *x > grid.support_hi {
                assert!(*d <= 1e-6, "density {d} at {x}");
            }
        }
    }

    #[test]
    fn atom_for_large_ratio() {
        let model = CovarianceModel::marchenko_pastur(2.0).unwrap();
        let grid = invert_density(&model, 4096, DEFAULT_EPS_SCHEDULE).unwrap();
        assert!((grid.atom_at_zero - 0.5).abs() < 1e-15);
        assert!((grid.total_mass() - 1.0).abs() < 1e-4, "{}", grid.total_mass());
    }

    #[test]
    fn closed_form_density_agrees() {
        let y = 0.5;
        let model = CovarianceModel::marchenko_pastur(y).unwrap();
        let (a, b) = ((1.0 - y.sqrt()).powi(2), (1.0 + y.sqrt()).powi(2));
        for x in [0.2, 0.7, 1.0, 2.0, 2.8] {
            let exact = ((b - x) * (x - a)).sqrt() / (2.0 * std::f64::consts::PI * x * y);
            let d = density_at(&model, x, DEFAULT_EPS_SCHEDULE).unwrap();
            assert!((d - exact).abs() < 1e-10, "x={x}: {d} vs {exact}");
        }
    }

    #[test]
    fn rejects_coarse_grid_and_short_schedule() {
        let model = CovarianceModel::marchenko_pastur(0.5).unwrap();
        assert!(invert_density(&model, 100, DEFAULT_EPS_SCHEDULE).is_err());
        assert!(invert_density(&model, 512, &[1e-1, 1e-8]).is_err());
    }
}
