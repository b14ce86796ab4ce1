use serde::{Deserialize, Serialize};

use crate::ensembles::{EntryLaw, PopulationShape};
use crate::error::{Error, Result};
use crate::lss::TestFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    CovCentralized,
    CovSimplified,
    FCentralized,
    FSimplified,
}

impl Pipeline {
    pub fn is_f_matrix(self) -> bool {
        matches!(self, Self::FCentralized | Self::FSimplified)
    }

    /// Whether samples are mean-subtracted with the `1/(n-1)` normalisation.
    pub fn is_centralized(self) -> bool {
        matches!(self, Self::CovCentralized | Self::FCentralized)
    }
}

/// Ratios used for the deterministic centering: `p/(n-1)` or `p/n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenteringConvention {
    Nminus1,
    N,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pipeline: Pipeline,
    pub p: usize,
    pub n: usize,
    /// Second sample size, F pipelines only.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub big_n: Option<usize>,
    pub law_x: EntryLaw,
    pub law_y: EntryLaw,
    pub shape: PopulationShape,
    pub f: TestFunction,
    pub reps: usize,
    pub master_seed: u64,
    pub centering_convention: CenteringConvention,
}

impl ExperimentConfig {
    /// Covariance experiment with Gaussian real entries, identity population
    /// and the centering that matches the pipeline.
    pub fn covariance(centralized: bool, p: usize, n: usize, f: TestFunction, reps: usize, master_seed: u64) -> Self {
        Self {
            pipeline: if centralized { Pipeline::CovCentralized } else { Pipeline::CovSimplified },
            p,
            n,
            big_n: None,
            law_x: EntryLaw::RealGaussian,
            law_y: EntryLaw::RealGaussian,
            shape: PopulationShape::Identity,
            f,
            reps,
            master_seed,
            centering_convention: if centralized { CenteringConvention::Nminus1 } else { CenteringConvention::N },
        }
    }

    /// F-matrix counterpart of [`ExperimentConfig::covariance`].
    #[allow(clippy::too_many_arguments)]
    pub fn f_matrix(
        centralized: bool,
        p: usize,
        n: usize,
        big_n: usize,
        f: TestFunction,
        reps: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            pipeline: if centralized { Pipeline::FCentralized } else { Pipeline::FSimplified },
            big_n: Some(big_n),
            ..Self::covariance(centralized, p, n, f, reps, master_seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.p == 0 || self.n < 2 {
            return bad(format!("need p >= 1 and n >= 2, got p = {}, n = {}", self.p, self.n));
        }
        if self.reps < 2 {
            return bad(format!("need at least 2 replications, got {}", self.reps));
        }
        self.law_x.validate()?;
        self.law_y.validate()?;
        self.f.validate()?;
        self.shape.diag(self.p)?;
        match (self.pipeline.is_f_matrix(), self.big_n) {
            (true, None) => bad("F pipelines need N".into()),
            (true, Some(big_n)) if self.p + 1 > big_n => {
                bad(format!("F pipelines need p <= N - 1, got p = {}, N = {big_n}", self.p))
            }
            (false, Some(_)) => bad("N is only meaningful for F pipelines".into()),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_field_names() {
        let c = ExperimentConfig::f_matrix(true, 50, 100, 200, TestFunction::Log, 10, 7);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["pipeline"], "f-centralized");
        assert_eq!(v["N"], 200);
        assert_eq!(v["centering_convention"], "nminus1");
        let back: ExperimentConfig = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = ExperimentConfig::f_matrix(true, 50, 100, 50, TestFunction::Log, 10, 7);
        assert!(c.validate().is_err());
        c.big_n = None;
        assert!(c.validate().is_err());
        let c = ExperimentConfig::covariance(true, 5, 1, TestFunction::Log, 10, 7);
        assert!(c.validate().is_err());
        let text = r#"{"pipeline":"cov-centralized","p":1,"n":2,"bogus":1}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(text).is_err());
    }
}
