use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Monte Carlo summary at one sample size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NEstimate {
    pub n: usize,
    pub p: usize,
    #[serde(with = "crate::serde_complex")]
    pub mean: Complex64,
    /// Mean of `|X - target|²` over replications.
    pub mse: f64,
    /// `|mean - target|`
    pub mean_error: f64,
    pub reps: usize,
    /// Draws rejected as singular and redrawn with a fresh seed.
    pub resampled: usize,
}

/// One recorded pass/fail criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: String,
    pub pass: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self { name: name.into(), value, threshold: format!("[{lo}, {hi}]"), pass: value >= lo && value <= hi }
    }

    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, threshold: format!("< {bound:e}"), pass: value < bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifierReport {
    pub lemma_id: String,
    pub n_values: Vec<usize>,
    pub estimates: Vec<NEstimate>,
    #[serde(with = "crate::serde_complex")]
    pub predicted_limit: Complex64,
    /// `MSE(2n)/MSE(n)` for consecutive sample sizes.
    pub rate_ratios: Vec<f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub reps: usize,
    pub seed: u64,
}

impl VerifierReport {
    pub(crate) fn finalize(mut self) -> Self {
        self.pass = !self.checks.is_empty() && self.checks.iter().all(|c| c.pass);
        self
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}
