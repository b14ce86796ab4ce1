use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fixed-point solver did not converge at z = {z}: best residual {best_residual:e}")]
    NonConvergence { z: Complex64, best_residual: f64 },

    #[error("evaluation point {z} is on or too close to the support [{lo}, {hi}]")]
    InvalidPoint { z: Complex64, lo: f64, hi: f64 },

    #[error("no unique Stieltjes branch at z = {0}")]
    BranchAmbiguity(Complex64),

    #[error("inner Marchenko-Pastur evaluation at w = {0} landed on the wrong branch")]
    BranchError(Complex64),

    #[error("denominator magnitude {0:e} is below the singularity threshold")]
    NearSingular(f64),

    #[error("invalid ratio: {0}")]
    InvalidRatio(String),

    #[error("invalid spectral weights: {0}")]
    InvalidWeights(String),

    #[error("nonpositive eigenvalue {0:e} in an input that must be positive definite")]
    SingularInput(f64),

    #[error("contour encloses the origin but the integrand has a branch cut there")]
    OriginInside,

    #[error("contour quadrature did not converge: last two estimates differ by {0:e}")]
    NoConvergence(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("S_y is numerically singular: min eigenvalue {min:e}, norm {norm:e}")]
    SingularSy { min: f64, norm: f64 },

    #[error("matrix is not Hermitian: asymmetry {0:e}")]
    NotHermitian(f64),

    #[error("invalid entry law: {0}")]
    InvalidLaw(String),

    #[error("test function not admissible: {0}")]
    NotAdmissible(String),

    #[error("log test function evaluated against a spectral atom at zero")]
    LogOnAtom,

    #[error("resolvent is singular: z within {0:e} of a realized eigenvalue")]
    SingularResolvent(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("replication failure rate {failures}/{reps} exceeds the 1% cap")]
    TooManyFailures { failures: usize, reps: usize },

    #[error("results file schema mismatch: {0}")]
    SchemaVersionMismatch(String),

    #[error("stored config hash {stored} does not match recomputed {computed}")]
    ConfigHashMismatch { stored: String, computed: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
