//! Linear spectral statistics `Σ f(λ_i) - p ∫ f dF` for the covariance and
//! F-matrix ensembles, with the centering measure evaluated at finite ratios.

mod centering;
mod function;
mod statistic;

pub use centering::{
    centering_integral, centering_integral_with, deterministic_centering_gap, CenteringGap, CenteringIntegral,
    CENTERING_TOL,
};
pub use function::TestFunction;
pub use statistic::{
    covariance_model, f_matrix_model, linear_statistic, lss_covariance, lss_f_matrix, LssValue, StatisticKind,
};
