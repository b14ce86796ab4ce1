use rmt_lss::ensembles::{EntryLaw, PopulationShape};
use rmt_lss::harness::{
    bias_demonstration, load_results, persist_results, run_experiment, CenteringConvention, ExperimentConfig,
};
use rmt_lss::lss::TestFunction;

#[test]
fn trace_statistic_is_unbiased() {
    // E tr S = tr T exactly, so the centered statistic has mean zero at any n.
    let mut cfg = ExperimentConfig::covariance(true, 20, 40, TestFunction::monomial(1).unwrap(), 800, 31);
    cfg.shape = PopulationShape::two_level(20, 10).unwrap();
    cfg.law_x = EntryLaw::ComplexGaussian;
    let r = run_experiment(&cfg).unwrap();
    assert!(r.stats.mean.abs() < 3.0 * r.stats.se_mean, "{:?}", r.stats);
}

#[test]
fn centering_conventions_differ_by_the_gap() {
    let mut cfg = ExperimentConfig::covariance(true, 30, 60, TestFunction::monomial(3).unwrap(), 100, 32);
    let right = run_experiment(&cfg).unwrap();
    cfg.centering_convention = CenteringConvention::N;
    let wrong = run_experiment(&cfg).unwrap();
    cfg.centering_convention = CenteringConvention::Nminus1;
    let report = bias_demonstration(&cfg).unwrap();
    let offset = wrong.stats.mean - right.stats.mean;
    assert!((offset - report.gap.finite).abs() < 1e-10);
    assert_eq!(right.samples.len(), 100);
}

#[test]
fn f_pipeline_results_survive_a_round_trip() {
    let cfg = ExperimentConfig::f_matrix(false, 8, 20, 30, TestFunction::Log, 60, 33);
    let r = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    persist_results(&r, &path).unwrap();
    let back = load_results(&path).unwrap();
    assert_eq!(
        back.samples.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        r.samples.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
    assert_eq!(back, r);
}
