//! Matrices of the form `D + Σ_k u_k w_kᴴ` with `D` diagonal. Products and
//! traces cost `O(p r²)` for total rank `r`, which makes the resolvent traces
//! of a rank-one-perturbed diagonal matrix cheap in its eigenbasis.

use num_complex::Complex64;

#[derive(Clone, Debug)]
pub(crate) struct DiagLowRank {
    pub diag: Vec<Complex64>,
    pub terms: Vec<(Vec<Complex64>, Vec<Complex64>)>,
}

fn dot_h(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl DiagLowRank {
    pub fn diagonal(diag: Vec<Complex64>) -> Self {
        Self { diag, terms: Vec::new() }
    }

    /// Adds `scale · u wᴴ`.
    pub fn plus_outer(mut self, scale: Complex64, u: &[Complex64], w: &[Complex64]) -> Self {
        self.terms.push((u.iter().map(|x| x * scale).collect(), w.to_vec()));
        self
    }

    pub fn mul(&self, other: &Self) -> Self {
        let diag: Vec<Complex64> = self.diag.iter().zip(&other.diag).map(|(a, b)| a * b).collect();
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        // (D₁ + Σ u wᴴ)(x yᴴ) = (D₁x + Σ u (wᴴx)) yᴴ
        for (x, y) in &other.terms {
            let mut left: Vec<Complex64> = self.diag.iter().zip(x).map(|(d, xi)| d * xi).collect();
            for (u, w) in &self.terms {
                let c = dot_h(w, x);
                for (l, ui) in left.iter_mut().zip(u) {
                    *l += ui * c;
                }
            }
            terms.push((left, y.clone()));
        }
        // (u wᴴ) D₂ = u (D₂ᴴ w)ᴴ
        for (u, w) in &self.terms {
            let right: Vec<Complex64> = other.diag.iter().zip(w).map(|(d, wi)| d.conj() * wi).collect();
            terms.push((u.clone(), right));
        }
        Self { diag, terms }
    }

    pub fn trace(&self) -> Complex64 {
        let d: Complex64 = self.diag.iter().sum();
        d + self.terms.iter().map(|(u, w)| dot_h(w, u)).sum::<Complex64>()
    }

    #[cfg(test)]
    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let p = self.diag.len();
        let mut m =
            nalgebra::DMatrix::from_fn(p, p, |i, j| if i == j { self.diag[i] } else { Complex64::new(0.0, 0.0) });
        for (u, w) in &self.terms {
            for i in 0..p {
                for j in 0..p {
                    m[(i, j)] += u[i] * w[j].conj();
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_trace_match_dense() {
        let a = DiagLowRank::diagonal(vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.3, 1.0)]).plus_outer(
            c(0.5, -1.0),
            &[c(1.0, 1.0), c(0.0, 2.0), c(-1.0, 0.0)],
            &[c(0.2, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
        );
        let b = DiagLowRank::diagonal(vec![c(0.0, 1.0), c(2.0, 0.0), c(1.0, 1.0)])
            .plus_outer(
                c(1.0, 0.0),
                &[c(3.0, 0.0), c(0.0, -1.0), c(1.0, 1.0)],
                &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)],
            )
            .plus_outer(
                c(0.0, 2.0),
                &[c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0)],
                &[c(1.0, 2.0), c(0.0, 0.0), c(1.0, 0.0)],
            );
        let dense = a.to_dense() * b.to_dense();
        let prod = a.mul(&b);
        assert!((prod.to_dense() - &dense).norm() < 1e-13);
        assert!((prod.trace() - dense.trace()).norm() < 1e-13);
    }
}
