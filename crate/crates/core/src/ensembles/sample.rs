use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{EntryLaw, PopulationShape};
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Relative asymmetry tolerated by [`hermitian_eigs`].
const HERMITIAN_TOL: f64 = 1e-12;
/// `S_y` counts as singular when its smallest eigenvalue is below this
/// fraction of its norm.
const SINGULAR_SY: f64 = 1e-10;

/// `p × n` matrix of i.i.d. draws from `law`, filled column by column.
pub fn draw_entries(p: usize, n: usize, law: &EntryLaw, seed: u64) -> Result<DMatrix<Complex64>> {
    if p == 0 || n == 0 {
        return Err(Error::DimensionMismatch(format!("p = {p}, n = {n} must be positive")));
    }
    law.validate()?;
    let mut rng = rng_from_seed(seed);
    let data: Vec<Complex64> = (0..p * n).map(|_| law.sample(&mut rng)).collect();
    Ok(DMatrix::from_vec(p, n, data))
}

pub fn is_real(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|c| c.im == 0.0)
}

fn real_part(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    m.map(|c| c.re)
}

fn complexify(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `a a*`, through the real product when `a` is real.
fn gram(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let g = if is_real(a) {
        let r = real_part(a);
        complexify(&(&r * r.transpose()))
    } else {
        a * a.adjoint()
    };
    hermitian_part(g)
}

fn hermitian_part(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `T^{1/2} X` together with the row means `ȳ`.
fn scaled(entries: &DMatrix<Complex64>, shape: &PopulationShape) -> Result<(DMatrix<Complex64>, DVector<Complex64>)> {
    let (p, n) = entries.shape();
    let root = shape.sqrt_diag(p)?;
    let mut y = entries.clone();
    for (i, r) in root.iter().enumerate() {
        if *r != 1.0 {
            y.row_mut(i).scale_mut(*r);
        }
    }
    let mean = y.column_sum() / Complex64::new(n as f64, 0.0);
    Ok((y, mean))
}

fn need_two_columns(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::DimensionMismatch(format!("centralized matrices need n >= 2, got {n}")));
    }
    Ok(())
}

/// Centralized sample covariance `S = (1/(n-1)) Σ (y_i - ȳ)(y_i - ȳ)*` with
/// `y_i = T^{1/2} X_i`, and its spectrum in descending order.
pub fn centralized_cov(
    entries: &DMatrix<Complex64>,
    shape: &PopulationShape,
) -> Result<(DMatrix<Complex64>, Vec<f64>)> {
    let n = entries.ncols();
    need_two_columns(n)?;
    let (mut y, mean) = scaled(entries, shape)?;
    for mut col in y.column_iter_mut() {
        col -= &mean;
    }
    let s = gram(&y) / Complex64::new((n - 1) as f64, 0.0);
    let eigs = hermitian_eigs(&s)?;
    Ok((s, eigs))
}

/// Simplified sample covariance `B = (1/n) Σ y_i y_i*` and its descending spectrum.
pub fn simplified_cov(entries: &DMatrix<Complex64>, shape: &PopulationShape) -> Result<(DMatrix<Complex64>, Vec<f64>)> {
    let n = entries.ncols();
    let (y, _) = scaled(entries, shape)?;
    let b = gram(&y) / Complex64::new(n as f64, 0.0);
    let eigs = hermitian_eigs(&b)?;
    Ok((b, eigs))
}

fn delta_from(b: &DMatrix<Complex64>, mean: &DVector<Complex64>, n: usize) -> DMatrix<Complex64> {
    let nf = n as f64;
    let outer = mean * mean.adjoint();
    hermitian_part(outer * Complex64::new(nf / (nf - 1.0), 0.0) - b / Complex64::new(nf - 1.0, 0.0))
}

/// `Δ = (n²/(n-1)) γ̄γ̄* - B/(n-1)` with `γ̄ = ȳ/√n`, so that `S = B - Δ`.
pub fn delta_matrix(entries: &DMatrix<Complex64>, shape: &PopulationShape) -> Result<DMatrix<Complex64>> {
    let n = entries.ncols();
    need_two_columns(n)?;
    let (y, mean) = scaled(entries, shape)?;
    let b = gram(&y) / Complex64::new(n as f64, 0.0);
    Ok(delta_from(&b, &mean, n))
}

fn asymmetry(m: &DMatrix<Complex64>) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    let norm = m.norm();
    let diff = (m - m.adjoint()).norm();
    Ok(if norm > 0.0 { diff / norm } else { 0.0 })
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues descending and the
/// matching unitary eigenvector matrix.
pub(crate) fn hermitian_eigh(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let asym = asymmetry(m)?;
    if asym > HERMITIAN_TOL {
        return Err(Error::NotHermitian(asym));
    }
    let (vals, vecs): (Vec<f64>, DMatrix<Complex64>) = if is_real(m) {
        let e = SymmetricEigen::new(real_part(m));
        (e.eigenvalues.iter().copied().collect(), complexify(&e.eigenvectors))
    } else {
        let e = SymmetricEigen::new(m.clone());
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let q = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| vecs[(r, order[c])]);
    Ok((sorted, q))
}

/// Full spectrum of a Hermitian matrix in descending order.
pub fn hermitian_eigs(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let asym = asymmetry(m)?;
    if asym > HERMITIAN_TOL {
        return Err(Error::NotHermitian(asym));
    }
    let mut vals: Vec<f64> = if is_real(m) {
        SymmetricEigen::new(real_part(m)).eigenvalues.iter().copied().collect()
    } else {
        SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect()
    };
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// One realized draw with both covariance estimators.
#[derive(Clone, Debug)]
pub struct MatrixSample {
    pub p: usize,
    pub n: usize,
    pub entries: DMatrix<Complex64>,
    pub shape: PopulationShape,
    /// Row means `ȳ` of `T^{1/2} X`.
    pub mean: DVector<Complex64>,
    pub s: DMatrix<Complex64>,
    pub b: DMatrix<Complex64>,
    pub delta: DMatrix<Complex64>,
    pub eigs_s: Vec<f64>,
    pub eigs_b: Vec<f64>,
    pub seed: u64,
}

impl MatrixSample {
    pub fn draw(p: usize, n: usize, law: &EntryLaw, shape: &PopulationShape, seed: u64) -> Result<Self> {
        Self::from_entries(draw_entries(p, n, law, seed)?, shape, seed)
    }

    pub fn from_entries(entries: DMatrix<Complex64>, shape: &PopulationShape, seed: u64) -> Result<Self> {
        let (p, n) = entries.shape();
        need_two_columns(n)?;
        let (s, eigs_s) = centralized_cov(&entries, shape)?;
        let (y, mean) = scaled(&entries, shape)?;
        let b = gram(&y) / Complex64::new(n as f64, 0.0);
        let eigs_b = hermitian_eigs(&b)?;
        let delta = delta_from(&b, &mean, n);
        Ok(Self { p, n, entries, shape: shape.clone(), mean, s, b, delta, eigs_s, eigs_b, seed })
    }

    /// `B - ȳȳ*`, the rank-one downdate of `B` equal to `(n-1)/n · S`.
    pub fn downdated(&self) -> DMatrix<Complex64> {
        hermitian_part(&self.b - &self.mean * self.mean.adjoint())
    }
}

/// Spectrum of `M_x M_y⁻¹` through the symmetric form `M_y^{-1/2} M_x M_y^{-1/2}`.
/// Also returns the spectrum of `M_y`.
fn ratio_spectrum(mx: &DMatrix<Complex64>, my: &DMatrix<Complex64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let (vals, q) = hermitian_eigh(my)?;
    let max = vals.first().copied().unwrap_or(0.0).abs();
    let min = vals.last().copied().unwrap_or(0.0);
    if !(min > SINGULAR_SY * max) {
        return Err(Error::SingularSy { min, norm: max });
    }
    let mut w = q.clone();
    for (j, v) in vals.iter().enumerate() {
        w.column_mut(j).scale_mut(1.0 / v.sqrt());
    }
    let root_inv = &w * q.adjoint();
    let sym = hermitian_part(&root_inv * mx * &root_inv);
    Ok((hermitian_eigs(&sym)?, vals))
}

/// An F-matrix pair: `F = S_x S_y⁻¹` and its simplified form `G = B_x B_y⁻¹`.
#[derive(Clone, Debug)]
pub struct FPair {
    pub sample_x: MatrixSample,
    pub sample_y: MatrixSample,
    pub eigs_f: Vec<f64>,
    pub eigs_g: Vec<f64>,
}

pub fn build_f_pair(
    entries_x: DMatrix<Complex64>,
    entries_y: DMatrix<Complex64>,
    shape: &PopulationShape,
    seeds: (u64, u64),
) -> Result<FPair> {
    let p = entries_x.nrows();
    let big_n = entries_y.ncols();
    if entries_y.nrows() != p {
        return Err(Error::DimensionMismatch(format!("X has {p} rows, Y has {}", entries_y.nrows())));
    }
    if p + 1 > big_n {
        return Err(Error::DimensionMismatch(format!("F-matrix needs p <= N - 1, got p = {p}, N = {big_n}")));
    }
    let sample_x = MatrixSample::from_entries(entries_x, shape, seeds.0)?;
    let sample_y = MatrixSample::from_entries(entries_y, shape, seeds.1)?;
    let (eigs_f, _) = ratio_spectrum(&sample_x.s, &sample_y.s)?;
    let (eigs_g, _) = ratio_spectrum(&sample_x.b, &sample_y.b)?;
    Ok(FPair { sample_x, sample_y, eigs_f, eigs_g })
}

/// Eigenvalues of `S_x S_y⁻¹` (centralized) or `B_x B_y⁻¹` (simplified)
/// without keeping the intermediate matrices. Also returns the spectrum of
/// `S_y` or `B_y`.
pub(crate) fn f_spectrum(
    entries_x: &DMatrix<Complex64>,
    entries_y: &DMatrix<Complex64>,
    shape: &PopulationShape,
    centralized: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = entries_x.nrows();
    if entries_y.nrows() != p || p + 1 > entries_y.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "F-matrix needs matching rows and p <= N - 1 (p = {p}, N = {})",
            entries_y.ncols()
        )));
    }
    let (mx, my) = if centralized {
        (centralized_cov(entries_x, shape)?.0, centralized_cov(entries_y, shape)?.0)
    } else {
        (simplified_cov(entries_x, shape)?.0, simplified_cov(entries_y, shape)?.0)
    };
    ratio_spectrum(&mx, &my)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn eigs_sorted_descending() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(3.0), c(1.0), c(2.0)]));
        assert_eq!(hermitian_eigs(&m).unwrap(), vec![3.0, 2.0, 1.0]);
        let id = DMatrix::<Complex64>::identity(4, 4);
        assert!(hermitian_eigs(&id).unwrap().iter().all(|v| (*v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::<Complex64>::identity(2, 2);
        m[(0, 1)] = c(1.0);
        assert!(matches!(hermitian_eigs(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn complex_trace_matches_spectrum() {
        let x = draw_entries(30, 30, &EntryLaw::ComplexGaussian, 5).unwrap();
        let m = hermitian_part(&x + x.adjoint());
        let eigs = hermitian_eigs(&m).unwrap();
        let tr = m.trace().re;
        assert!((eigs.iter().sum::<f64>() - tr).abs() < 1e-11 * tr.abs().max(1.0));
        let (vals, q) = hermitian_eigh(&m).unwrap();
        let lam = DMatrix::from_diagonal(&DVector::from_iterator(vals.len(), vals.iter().map(|v| c(*v))));
        let recon = &q * lam * q.adjoint();
        assert!((recon - &m).norm() < 1e-12 * m.norm());
    }

    #[test]
    fn equal_columns_centralize_to_zero() {
        let x = DMatrix::from_vec(2, 2, vec![c(1.0), c(2.0), c(1.0), c(2.0)]);
        let (s, eigs) = centralized_cov(&x, &PopulationShape::Identity).unwrap();
        assert!(s.norm() < 1e-15);
        assert!(eigs.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn decomposition_and_scaling_identities() {
        for (law, seed) in [(EntryLaw::RealGaussian, 1u64), (EntryLaw::ComplexGaussian, 2)] {
            let shape = PopulationShape::two_level(20, 10).unwrap();
            let smp = MatrixSample::draw(20, 40, &law, &shape, seed).unwrap();
            let nb = smp.b.norm();
            assert!((&smp.s - (&smp.b - &smp.delta)).norm() < 1e-12 * nb);
            let nf = smp.n as f64;
            let scaled = smp.downdated() * c(nf / (nf - 1.0));
            assert!((&smp.s - scaled).norm() < 1e-12 * nb);
        }
    }

    #[test]
    fn zero_mean_columns_give_scaled_b() {
        let half = draw_entries(5, 4, &EntryLaw::RealGaussian, 9).unwrap();
        let x = DMatrix::from_fn(5, 8, |i, j| if j < 4 { half[(i, j)] } else { -half[(i, j - 4)] });
        let smp = MatrixSample::from_entries(x, &PopulationShape::Identity, 0).unwrap();
        let expected = &smp.b / c(-7.0);
        assert!((&smp.delta - expected).norm() < 1e-14 * smp.b.norm());
    }

    #[test]
    fn shift_invariance() {
        let x = draw_entries(6, 12, &EntryLaw::RealGaussian, 3).unwrap();
        let shifted = DMatrix::from_fn(6, 12, |i, j| x[(i, j)] + c(0.3 * i as f64 - 1.0));
        let (s1, _) = centralized_cov(&x, &PopulationShape::Identity).unwrap();
        let (s2, _) = centralized_cov(&shifted, &PopulationShape::Identity).unwrap();
        assert!((s1 - s2).norm() < 1e-12);
    }

    #[test]
    fn deterministic_draws() {
        let a = draw_entries(4, 7, &EntryLaw::RealThreepoint, 77).unwrap();
        let b = draw_entries(4, 7, &EntryLaw::RealThreepoint, 77).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, draw_entries(4, 7, &EntryLaw::RealThreepoint, 78).unwrap());
    }

    #[test]
    fn f_pair_of_identical_samples_is_identity() {
        let x = draw_entries(10, 30, &EntryLaw::RealGaussian, 4).unwrap();
        let pair = build_f_pair(x.clone(), x, &PopulationShape::Identity, (0, 0)).unwrap();
        assert!(pair.eigs_f.iter().all(|v| (v - 1.0).abs() < 1e-10));
        assert!(pair.eigs_g.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn f_pair_requires_enough_y_columns() {
        let x = draw_entries(10, 30, &EntryLaw::RealGaussian, 4).unwrap();
        let y = draw_entries(10, 10, &EntryLaw::RealGaussian, 5).unwrap();
        assert!(matches!(build_f_pair(x, y, &PopulationShape::Identity, (0, 0)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn f_spectrum_independent_of_population() {
        let x = draw_entries(8, 20, &EntryLaw::RealGaussian, 6).unwrap();
        let y = draw_entries(8, 25, &EntryLaw::RealGaussian, 7).unwrap();
        let shape = PopulationShape::two_level(8, 4).unwrap();
        let (a, _) = f_spectrum(&x, &y, &PopulationShape::Identity, true).unwrap();
        let (b, _) = f_spectrum(&x, &y, &shape, true).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-10 * u.abs().max(1.0));
        }
    }
}
