use nalgebra::DVector;
use num_complex::Complex64;

use super::lowrank::DiagLowRank;
use crate::ensembles::{draw_entries, hermitian_eigh, EntryLaw, PopulationShape};
use crate::error::{Error, Result};

/// Draws with `|λ_i(S) - z|` below this are rejected as singular.
pub(crate) const RESOLVENT_FLOOR: f64 = 1e-8;

/// Every lemma-level quantity of one realized sample at `z` (and at the second
/// point `z₂` of the two-point variant). `A = B - zI`, `A - Δ = S - zI`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SampleQuantities {
    /// `γ₁* A⁻¹ γ₁`
    pub quadform: Complex64,
    /// `γ₁* A⁻² γ₁`
    pub quadform_sq: Complex64,
    /// `γ₁* A(z ± ε)⁻¹ γ₁` central difference, for the derivative cross-check.
    pub quadform_fd: Complex64,
    /// `tr A⁻¹Δ`
    pub trace_delta: Complex64,
    /// `tr A⁻²Δ`
    pub trace_delta_sq: Complex64,
    /// `tr A⁻²ΔA⁻¹Δ`
    pub delta_quadratic: Complex64,
    /// `tr A⁻¹(z)ΔA⁻¹(z₂)Δ`
    pub delta_two_point: Complex64,
    /// `tr A⁻¹(ΔA⁻¹)²`
    pub second_order: Complex64,
    /// `tr (A-Δ)⁻¹(ΔA⁻¹)³`
    pub third_order: Complex64,
    /// `tr (A-Δ)⁻¹ - tr A⁻¹` from the eigenvalues directly.
    pub resolvent_gap: Complex64,
    /// `tr (A⁻¹Δ)²(A-Δ)⁻¹`
    pub q2: Complex64,
    /// `tr (A⁻¹Δ)³(A-Δ)⁻¹`
    pub q3: Complex64,
}

impl SampleQuantities {
    /// `tr A⁻²Δ + tr A⁻¹(ΔA⁻¹)² + tr (A-Δ)⁻¹(ΔA⁻¹)³`
    pub fn combined(&self) -> Complex64 {
        self.trace_delta_sq + self.second_order + self.third_order
    }
}

const FD_STEP: f64 = 1e-6;

pub(crate) fn sample_quantities(
    z: Complex64,
    z2: Complex64,
    p: usize,
    n: usize,
    law: &EntryLaw,
    seed: u64,
) -> Result<SampleQuantities> {
    let x = draw_entries(p, n, law, seed)?;
    quantities_from_entries(z, z2, &x, &PopulationShape::Identity)
}

pub(crate) fn quantities_from_entries(
    z: Complex64,
    z2: Complex64,
    x: &nalgebra::DMatrix<Complex64>,
    shape: &PopulationShape,
) -> Result<SampleQuantities> {
    let (p, n) = x.shape();
    let root = shape.sqrt_diag(p)?;
    let sn = (n as f64).sqrt();
    let mut gamma = x.clone();
    for (i, r) in root.iter().enumerate() {
        gamma.row_mut(i).scale_mut(r / sn);
    }
    let b = &gamma * gamma.adjoint();
    let b = (&b + b.adjoint()) * Complex64::new(0.5, 0.0);
    let (lambda, q) = hermitian_eigh(&b)?;
    let qh = q.adjoint();
    let w1: DVector<Complex64> = &qh * gamma.column(0);
    // ȳ = √n γ̄
    let ybar: DVector<Complex64> = gamma.column_sum() / Complex64::new(sn, 0.0);
    let v: Vec<Complex64> = (&qh * ybar).iter().copied().collect();

    let resolvent = |z: Complex64| -> Vec<Complex64> { lambda.iter().map(|l| 1.0 / (l - z)).collect() };
    let r = resolvent(z);
    let r2 = resolvent(z2);
    let quad = |d: &[Complex64], w: &DVector<Complex64>| -> Complex64 {
        d.iter().zip(w.iter()).map(|(di, wi)| di * wi.norm_sqr()).sum()
    };
    let r_sq: Vec<Complex64> = r.iter().map(|x| x * x).collect();
    let quadform = quad(&r, &w1);
    let quadform_sq = quad(&r_sq, &w1);
    let eps = Complex64::new(FD_STEP, 0.0);
    let quadform_fd = (quad(&resolvent(z + eps), &w1) - quad(&resolvent(z - eps), &w1)) / (2.0 * eps);

    if n < 2 {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        return Ok(SampleQuantities {
            quadform,
            quadform_sq,
            quadform_fd,
            trace_delta: nan,
            trace_delta_sq: nan,
            delta_quadratic: nan,
            delta_two_point: nan,
            second_order: nan,
            third_order: nan,
            resolvent_gap: nan,
            q2: nan,
            q3: nan,
        });
    }

    let nf = n as f64;
    let c = Complex64::new(nf / (nf - 1.0), 0.0);
    let one = Complex64::new(1.0, 0.0);
    // Δ in the eigenbasis: c vvᴴ - diag(λ/(n-1)).
    let delta = DiagLowRank::diagonal(lambda.iter().map(|l| Complex64::new(-l / (nf - 1.0), 0.0)).collect())
        .plus_outer(c, &v, &v);
    let ra = DiagLowRank::diagonal(r.clone());
    let rb = DiagLowRank::diagonal(r2);
    // (A - Δ)⁻¹ = (D - c vvᴴ)⁻¹ with D = diag(cλ - z), by Sherman–Morrison.
    let d_inv: Vec<Complex64> = lambda.iter().map(|l| 1.0 / (c * l - z)).collect();
    if d_inv.iter().any(|d| !(d.norm() < 1.0 / RESOLVENT_FLOOR)) {
        return Err(Error::SingularResolvent(RESOLVENT_FLOOR));
    }
    let dv: Vec<Complex64> = d_inv.iter().zip(&v).map(|(d, vi)| d * vi).collect();
    let dhv: Vec<Complex64> = d_inv.iter().zip(&v).map(|(d, vi)| d.conj() * vi).collect();
    let vdv: Complex64 = v.iter().zip(&dv).map(|(vi, x)| vi.conj() * x).sum();
    let denom = one - c * vdv;
    if denom.norm() < RESOLVENT_FLOOR {
        return Err(Error::SingularResolvent(denom.norm()));
    }
    let m_inv = DiagLowRank::diagonal(d_inv.clone()).plus_outer(c / denom, &dv, &dhv);

    let ad = ra.mul(&delta);
    let da = delta.mul(&ra);
    let trace_delta = ad.trace();
    let r2a = ra.mul(&ra);
    let trace_delta_sq = r2a.mul(&delta).trace();
    let delta_quadratic = r2a.mul(&delta).mul(&ra).mul(&delta).trace();
    let delta_two_point = ad.mul(&rb).mul(&delta).trace();
    let second_order = ra.mul(&da).mul(&da).trace();
    let third_order = m_inv.mul(&da).mul(&da).mul(&da).trace();
    let ad2 = ad.mul(&ad);
    let q2 = ad2.mul(&m_inv).trace();
    let q3 = ad2.mul(&ad).mul(&m_inv).trace();
    let tr_m: Complex64 = m_inv.trace();
    let tr_a: Complex64 = r.iter().sum();

    Ok(SampleQuantities {
        quadform,
        quadform_sq,
        quadform_fd,
        trace_delta,
        trace_delta_sq,
        delta_quadratic,
        delta_two_point,
        second_order,
        third_order,
        resolvent_gap: tr_m - tr_a,
        q2,
        q3,
    })
}
