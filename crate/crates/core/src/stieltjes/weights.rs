use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A discrete spectral distribution: atoms `t_i >= 0` carrying weights `w_i`.
///
/// Population spectra `H_p`, their limits, and empirical eigenvalue measures
/// all live here, so every integral against them is an exact finite sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralWeights {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectralWeights {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidWeights("at least one atom is required".into()));
        }
        if atoms.len() != weights.len() {
            return Err(Error::InvalidWeights(format!("{} atoms but {} weights", atoms.len(), weights.len())));
        }
        if let Some(t) = atoms.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::InvalidWeights(format!("atom {t} is not a finite nonnegative real")));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { atoms, weights })
    }

    /// Point mass at `t`.
    pub fn point_mass(t: f64) -> Result<Self> {
        Self::new(vec![t], vec![1.0])
    }

    /// Equal weight `1/k` on each of the given values (an empirical measure).
    /// Repeated values are merged.
    pub fn empirical(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidWeights("empty empirical measure".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let unit = 1.0 / values.len() as f64;
        let mut atoms: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut counts: Vec<usize> = Vec::with_capacity(sorted.len());
        for v in sorted {
            match atoms.last() {
                Some(&last) if last == v => *counts.last_mut().unwrap() += 1,
                _ => {
                    atoms.push(v);
                    counts.push(1);
                }
            }
        }
        let mut weights: Vec<f64> = counts.iter().map(|&c| c as f64 * unit).collect();
        // Push the rounding residue into the heaviest atom so the sum is 1 to the last bit
        // that matters for the 1e-12 check.
        let residue = 1.0 - weights.iter().sum::<f64>();
        let heaviest = (0..weights.len()).max_by(|&a, &b| weights[a].total_cmp(&weights[b])).unwrap();
        weights[heaviest] += residue;
        Self::new(atoms, weights)
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().zip(self.weights.iter().copied())
    }

    /// `∫ φ(t) dH(t)` as a weighted sum.
    pub fn integrate<T, F>(&self, mut phi: F) -> T
    where
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
        F: FnMut(f64) -> T,
    {
        self.iter().map(|(t, w)| phi(t) * w).sum()
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|t| t)
    }

    pub fn min_atom(&self) -> f64 {
        self.atoms.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_atom(&self) -> f64 {
        self.atoms.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Distribution of `1/t` (all atoms must be positive).
    pub fn reciprocal(&self) -> Result<Self> {
        if let Some(t) = self.atoms.iter().find(|t| **t <= 0.0) {
            return Err(Error::SingularInput(*t));
        }
        let mut pairs: Vec<(f64, f64)> = self.iter().map(|(t, w)| (1.0 / t, w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (atoms, weights) = pairs.into_iter().unzip();
        Self::new(atoms, weights)
    }
}
