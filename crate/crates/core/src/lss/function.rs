use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 8;

/// Test function from the supported analytic catalogue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFunction {
    /// `Σ c_k x^k`, coefficients in increasing degree.
    Polynomial {
        coefficients: Vec<f64>,
    },
    Log,
    Exp,
}

impl TestFunction {
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        let f = Self::Polynomial { coefficients };
        f.validate()?;
        Ok(f)
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Result<Self> {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Self::polynomial(c)
    }

    pub fn validate(&self) -> Result<()> {
        if let Self::Polynomial { coefficients } = self {
            if coefficients.is_empty() || coefficients.len() > MAX_DEGREE + 1 {
                return Err(Error::NotAdmissible(format!(
                    "polynomial needs 1 to {} coefficients, got {}",
                    MAX_DEGREE + 1,
                    coefficients.len()
                )));
            }
            if coefficients.iter().any(|c| !c.is_finite()) {
                return Err(Error::NotAdmissible("non-finite polynomial coefficient".into()));
            }
        }
        Ok(())
    }

    /// Whether `f` has a branch cut on `(-∞, 0]`.
    pub fn has_branch_at_origin(&self) -> bool {
        matches!(self, Self::Log)
    }

    /// Checks analyticity on a neighbourhood of the spectrum: `log` needs the
    /// support strictly positive and no mass at 0.
    pub fn check_admissible(&self, support_lo: f64, atom_at_zero: f64) -> Result<()> {
        self.validate()?;
        if self.has_branch_at_origin() {
            if atom_at_zero > 0.0 {
                return Err(Error::LogOnAtom);
            }
            if !(support_lo > 0.0) {
                return Err(Error::NotAdmissible(format!("log needs support_lo > 0, got {support_lo}")));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Polynomial { coefficients } => coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Self::Log => x.ln(),
            Self::Exp => x.exp(),
        }
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
            }
            Self::Log => z.ln(),
            Self::Exp => z.exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_matches_direct() {
        let f = TestFunction::polynomial(vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(f.eval(2.0), 1.0 - 4.0 + 2.0);
        let z = Complex64::new(0.3, -1.1);
        assert!((f.eval_complex(z) - (1.0 - 2.0 * z + 0.5 * z * z)).norm() < 1e-15);
    }

    #[test]
    fn degree_cap() {
        assert!(TestFunction::monomial(8).is_ok());
        assert!(TestFunction::monomial(9).is_err());
        assert!(TestFunction::polynomial(vec![]).is_err());
    }

    #[test]
    fn log_admissibility() {
        assert!(TestFunction::Log.check_admissible(0.1, 0.0).is_ok());
        assert!(matches!(TestFunction::Log.check_admissible(0.1, 0.5), Err(Error::LogOnAtom)));
        assert!(TestFunction::Log.check_admissible(0.0, 0.0).is_err());
        assert!(TestFunction::Exp.check_admissible(0.0, 0.5).is_ok());
    }

    #[test]
    fn serde_shape() {
        let f: TestFunction = serde_json::from_str(r#"{"kind":"polynomial","coefficients":[0,0,1]}"#).unwrap();
        assert_eq!(f, TestFunction::monomial(2).unwrap());
        assert_eq!(serde_json::to_string(&TestFunction::Log).unwrap(), r#"{"kind":"log"}"#);
    }
}
