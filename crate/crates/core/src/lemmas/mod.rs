//! Checks of the proof skeleton: exact algebraic identities at machine
//! precision, and Monte Carlo estimates of the lemma limits with their
//! `O(1/n)` mean-square rates.

mod exact;
mod fdecomp;
mod lowrank;
mod montecarlo;
mod quantities;
mod report;
mod shift;

pub use exact::{
    decomposition_error, interlacing_details, resolvent_expansion_error, trace_delta_zero_mean, verify_exact_suite,
    verify_interlacing, InterlacingCheck,
};
pub use fdecomp::{f_decomposition_terms, verify_f_decomposition, FDecompConfig};
pub use montecarlo::{
    run_lemma_suite, verify_combined_correction, verify_delta_quadratic, verify_quadform, verify_quadform_sq,
    verify_trace_delta, LemmaConfig, MEAN_REL_TOL, MSE_RATE_BAND,
};
pub use report::{Check, NEstimate, VerifierReport};
pub use shift::{verify_shift, SHIFT_RATE_BAND};
