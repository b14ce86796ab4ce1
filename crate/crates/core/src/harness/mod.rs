//! Monte Carlo replication of linear spectral statistics and the two-sample
//! comparisons built on them.

mod config;
mod persist;
mod run;
mod stats;

pub use config::{CenteringConvention, ExperimentConfig, Pipeline};
pub use persist::{config_hash, load_results, persist_results, RESULTS_SCHEMA_VERSION};
pub use run::{
    bias_demonstration, compare_pipelines, gaussianity_report, run_experiment, BiasReport, ComparisonOutcome,
    ComparisonReport, ExperimentResult, GaussianityReport, Thresholds, Verdict, MAX_FAILURE_RATE,
};
pub use stats::{ks_normal_p_value, ks_two_sample_p_value, SummaryStats};
