use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stieltjes::SpectralWeights;

/// Diagonal population covariance `T_p`. `T_p^{1/2}` is the elementwise root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "diag_values", rename_all = "kebab-case")]
pub enum PopulationShape {
    Identity,
    Diagonal(Vec<f64>),
}

impl PopulationShape {
    pub fn diagonal(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidConfig("diagonal population entries must be positive and finite".into()));
        }
        Ok(Self::Diagonal(values))
    }

    /// `diag(1, …, 1, 2, …, 2)` with the first `ones` entries equal to 1.
    pub fn two_level(p: usize, ones: usize) -> Result<Self> {
        if ones > p {
            return Err(Error::DimensionMismatch(format!("{ones} ones in dimension {p}")));
        }
        Self::diagonal((0..p).map(|i| if i < ones { 1.0 } else { 2.0 }).collect())
    }

    /// Diagonal of `T_p`.
    pub fn diag(&self, p: usize) -> Result<Vec<f64>> {
        match self {
            Self::Identity => Ok(vec![1.0; p]),
            Self::Diagonal(v) if v.len() == p => Ok(v.clone()),
            Self::Diagonal(v) => Err(Error::DimensionMismatch(format!("shape has {} entries, p = {p}", v.len()))),
        }
    }

    /// Diagonal of `T_p^{1/2}`.
    pub fn sqrt_diag(&self, p: usize) -> Result<Vec<f64>> {
        Ok(self.diag(p)?.into_iter().map(f64::sqrt).collect())
    }

    /// The ESD `H_p` of `T_p`.
    pub fn spectrum(&self, p: usize) -> Result<SpectralWeights> {
        SpectralWeights::empirical(&self.diag(p)?)
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Self::Identity => true,
            Self::Diagonal(v) => v.iter().all(|t| *t == 1.0),
        }
    }
}
