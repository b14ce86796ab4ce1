use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MOMENT_TOL: f64 = 1e-12;

/// Distribution of the i.i.d. entries `X_ij`. Every law has mean 0 and unit
/// variance; complex laws additionally have `E X² = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntryLaw {
    RealGaussian,
    /// `(ξ₁ + iξ₂)/√2` with independent standard normals.
    ComplexGaussian,
    /// `±√3` with probability 1/6 each and `0` with probability 2/3, so that
    /// `E X⁴ = 3` exactly as for the real Gaussian.
    RealThreepoint,
    CustomDiscrete {
        #[serde(with = "crate::serde_complex::vec")]
        values: Vec<Complex64>,
        probs: Vec<f64>,
    },
}

impl EntryLaw {
    pub fn custom_discrete(values: Vec<Complex64>, probs: Vec<f64>) -> Result<Self> {
        let law = Self::CustomDiscrete { values, probs };
        law.validate()?;
        Ok(law)
    }

    /// Checks the moment conditions. Built-in laws hold them by construction;
    /// custom laws are checked by exact summation.
    pub fn validate(&self) -> Result<()> {
        let Self::CustomDiscrete { values, probs } = self else {
            return Ok(());
        };
        if values.is_empty() || values.len() != probs.len() {
            return Err(Error::InvalidLaw("values and probs must be nonempty and of equal length".into()));
        }
        if probs.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(Error::InvalidLaw("probabilities must be positive".into()));
        }
        if (probs.iter().sum::<f64>() - 1.0).abs() > MOMENT_TOL {
            return Err(Error::InvalidLaw("probabilities must sum to 1".into()));
        }
        let mean: Complex64 = values.iter().zip(probs).map(|(v, p)| v * p).sum();
        if mean.norm() > MOMENT_TOL {
            return Err(Error::InvalidLaw(format!("mean {mean} is not 0")));
        }
        let var: f64 = values.iter().zip(probs).map(|(v, p)| v.norm_sqr() * p).sum();
        if (var - 1.0).abs() > MOMENT_TOL {
            return Err(Error::InvalidLaw(format!("E|X|^2 = {var}, expected 1")));
        }
        if self.is_complex() && self.second_raw_moment().norm() > MOMENT_TOL {
            return Err(Error::InvalidLaw("complex law needs E X^2 = 0".into()));
        }
        Ok(())
    }

    pub fn is_complex(&self) -> bool {
        match self {
            Self::RealGaussian | Self::RealThreepoint => false,
            Self::ComplexGaussian => true,
            Self::CustomDiscrete { values, .. } => values.iter().any(|v| v.im != 0.0),
        }
    }

    /// `κ`: 2 for real laws, 1 for complex ones.
    pub fn kappa(&self) -> f64 {
        if self.is_complex() {
            1.0
        } else {
            2.0
        }
    }

    pub fn fourth_abs_moment(&self) -> f64 {
        match self {
            Self::RealGaussian | Self::RealThreepoint => 3.0,
            Self::ComplexGaussian => 2.0,
            Self::CustomDiscrete { values, probs } => {
                values.iter().zip(probs).map(|(v, p)| v.norm_sqr() * v.norm_sqr() * p).sum()
            }
        }
    }

    pub fn second_raw_moment(&self) -> Complex64 {
        match self {
            Self::RealGaussian | Self::RealThreepoint => Complex64::new(1.0, 0.0),
            Self::ComplexGaussian => Complex64::new(0.0, 0.0),
            Self::CustomDiscrete { values, probs } => values.iter().zip(probs).map(|(v, p)| v * v * p).sum(),
        }
    }

    /// `β = E|X|⁴ - 1 - κ`; zero for both Gaussian laws.
    pub fn beta(&self) -> f64 {
        self.fourth_abs_moment() - 1.0 - self.kappa()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match self {
            Self::RealGaussian => Complex64::new(rng.sample(StandardNormal), 0.0),
            Self::ComplexGaussian => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
            Self::RealThreepoint => {
                let u: f64 = rng.random();
                let s3 = 3f64.sqrt();
                let v = if u < 1.0 / 6.0 {
                    s3
                } else if u < 1.0 / 3.0 {
                    -s3
                } else {
                    0.0
                };
                Complex64::new(v, 0.0)
            }
            Self::CustomDiscrete { values, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                values[values.len() - 1]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    #[test]
    fn builtin_moments() {
        assert_eq!(EntryLaw::RealGaussian.beta(), 0.0);
        assert_eq!(EntryLaw::ComplexGaussian.beta(), 0.0);
        assert_eq!(EntryLaw::RealThreepoint.beta(), 0.0);
        assert_eq!(EntryLaw::ComplexGaussian.kappa(), 1.0);
        assert_eq!(EntryLaw::ComplexGaussian.second_raw_moment(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn custom_validation() {
        let rademacher =
            EntryLaw::custom_discrete(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)], vec![0.5, 0.5])
                .unwrap();
        assert_eq!(rademacher.fourth_abs_moment(), 1.0);
        assert_eq!(rademacher.beta(), -2.0);
        assert!(EntryLaw::custom_discrete(vec![Complex64::new(1.0, 0.0)], vec![1.0]).is_err());
        // Purely imaginary ±i has E X² = -1, so it is not an admissible complex law.
        assert!(EntryLaw::custom_discrete(vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)], vec![0.5, 0.5])
            .is_err());
        let quarter = vec![0.25; 4];
        let units = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ];
        let l = EntryLaw::custom_discrete(units, quarter).unwrap();
        assert!(l.is_complex());
        assert_eq!(l.kappa(), 1.0);
    }

    #[test]
    fn threepoint_sample_moments() {
        let law = EntryLaw::RealThreepoint;
        let mut rng = rng_from_seed(11);
        let n = 1_000_000;
        let (mut m2, mut m4, mut m2sq, mut m4sq) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let x = law.sample(&mut rng).re;
            let x2 = x * x;
            m2 += x2;
            m4 += x2 * x2;
            m2sq += x2 * x2;
            m4sq += x2 * x2 * x2 * x2;
        }
        let nf = n as f64;
        let (e2, e4) = (m2 / nf, m4 / nf);
        let se2 = ((m2sq / nf - e2 * e2) / nf).sqrt();
        let se4 = ((m4sq / nf - e4 * e4) / nf).sqrt();
        assert!((e2 - 1.0).abs() < 3.0 * se2, "E X^2 = {e2}");
        assert!((e4 - 3.0).abs() < 3.0 * se4, "E X^4 = {e4}");
    }

    #[test]
    fn serde_tags() {
        let s = serde_json::to_string(&EntryLaw::RealThreepoint).unwrap();
        assert_eq!(s, r#"{"kind":"real-threepoint"}"#);
        let back: EntryLaw = serde_json::from_str(r#"{"kind":"complex-gaussian"}"#).unwrap();
        assert_eq!(back, EntryLaw::ComplexGaussian);
    }
}
