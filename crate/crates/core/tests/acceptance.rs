//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rmt_lss::ensembles::EntryLaw;
use rmt_lss::harness::{bias_demonstration, compare_pipelines, run_experiment, ExperimentConfig};
use rmt_lss::lemmas::{
    run_lemma_suite, verify_exact_suite, verify_f_decomposition, verify_shift, FDecompConfig, LemmaConfig,
};
use rmt_lss::lss::{deterministic_centering_gap, TestFunction};
use rmt_lss::stieltjes::{
    density_integral, f_support, invert_density, mp_quadratic, shift_limit, solve_companion, CovarianceModel,
    FMatrixModel, Ratio, SpectralWeights, DEFAULT_EPS_SCHEDULE, DEFAULT_TOL,
};

type Outcome = rmt_lss::Result<(bool, String)>;

/// Name, time budget in seconds and the check itself.
type Criterion = (&'static str, u64, Box<dyn FnOnce() -> Outcome>);

/// 10 × 10 points: real parts across and beyond the supports, imaginary parts
/// from 1e-3 to 10.
fn z_grid() -> Vec<Complex64> {
    let mut grid = Vec::with_capacity(100);
    for i in 0..10 {
        for j in 0..10 {
            let re = -1.0 + 6.0 * i as f64 / 9.0;
            let im = 10f64.powf(-3.0 + 4.0 * j as f64 / 9.0);
            grid.push(Complex64::new(re, im));
        }
    }
    grid
}

fn solver_oracle() -> Outcome {
    let h = SpectralWeights::point_mass(1.0)?;
    let mut worst = 0.0_f64;
    for y in [0.1, 0.5, 1.0, 2.0] {
        for z in z_grid() {
            let solved = solve_companion(z, Ratio::limit(y)?, &h, DEFAULT_TOL)?.m_under;
            let closed = mp_quadratic(z, y)?;
            worst = worst.max((solved - closed).norm() / closed.norm().max(1.0));
        }
    }
    Ok((worst < 1e-10, format!("max relative gap {worst:.1e}")))
}

fn shift_convergence() -> Outcome {
    let h = SpectralWeights::point_mass(1.0)?;
    let mut ratios = Vec::new();
    for z in [Complex64::new(4.0, 0.0), Complex64::new(1.0, 1.0)] {
        ratios.extend(verify_shift(z, 0.5, &[100, 200, 400, 800], &h)?.rate_ratios);
    }
    let pass = ratios.iter().all(|r| (0.25..=0.75).contains(r));
    Ok((pass, format!("error ratios {}", fmt_list(&ratios))))
}

/// `L(z)` from the solver against `(m̲ + z m̲')(1 + z m̲)/(-z m̲)` built from the
/// closed-form root, with `m̲'` from implicit differentiation of
/// `z m̲² + (z + 1 - y) m̲ + 1 = 0`.
fn cancellation() -> Outcome {
    let y = 0.5;
    let model = CovarianceModel::marchenko_pastur(y)?;
    let mut worst = 0.0_f64;
    for z in z_grid() {
        let m = mp_quadratic(z, y)?;
        let dm = -(m * m + m) / (2.0 * z * m + z + 1.0 - y);
        let correction = (m + z * dm) * (1.0 + z * m) / (-z * m);
        let limit = shift_limit(z, &model, DEFAULT_TOL)?;
        worst = worst.max((limit + correction).norm());
    }
    Ok((worst < 1e-10, format!("max |L + correction| {worst:.1e}")))
}

fn exact_decompositions() -> Outcome {
    let report = verify_exact_suite(50, 100, &EntryLaw::RealGaussian, Complex64::new(1.0, 1.0), 1000, 20_240_603)?;
    let detail = report.checks.iter().map(|c| format!("{} {:.1e}", c.name, c.value)).collect::<Vec<_>>().join(", ");
    Ok((report.pass, detail))
}

fn f_identity() -> Outcome {
    let report = verify_f_decomposition(&FDecompConfig::default())?;
    let gap = report.estimates[0].mean_error;
    Ok((report.pass && gap < 1e-6, format!("max |LHS - RHS| {gap:.1e} over {} samples", report.reps)))
}

fn lemma_rates() -> Outcome {
    let reports = run_lemma_suite(&LemmaConfig::default())?;
    let mut parts = Vec::new();
    for r in &reports {
        let means: String = r
            .checks
            .iter()
            .filter(|c| c.name.contains("relative mean error"))
            .map(|c| format!(", mean rel err {:.3}", c.value))
            .collect();
        parts.push(format!("{} ratios {}{means}", r.lemma_id, fmt_list(&r.rate_ratios)));
    }
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.failed_checks().into_iter().map(move |c| format!("{}: {}", r.lemma_id, c.name)))
        .collect();
    if !failed.is_empty() {
        parts.push(format!("failed {}", failed.join("; ")));
    }
    Ok((failed.is_empty(), parts.join("; ")))
}

fn exact_moments() -> Outcome {
    let (p, n) = (100, 200);
    let r = run_experiment(&ExperimentConfig::covariance(true, p, n, TestFunction::monomial(1)?, 2000, 20_240_604))?;
    let target = 2.0 * p as f64 / (n as f64 - 1.0);
    let z = r.stats.mean / r.stats.se_mean;
    let rel = r.stats.variance / target - 1.0;
    Ok((
        z.abs() < 3.0 && rel.abs() < 0.15,
        format!("mean/SE {z:.2}, variance {:.4} vs {target:.4} ({:+.1}%)", r.stats.variance, 100.0 * rel),
    ))
}

fn equivalence(f_matrix: bool, functions: [TestFunction; 2], seed: u64) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, f) in functions.into_iter().enumerate() {
        let seed = seed + 10 * k as u64;
        let (a, b) = if f_matrix {
            (
                ExperimentConfig::f_matrix(true, 50, 100, 200, f.clone(), 2000, seed),
                ExperimentConfig::f_matrix(false, 50, 100, 200, f.clone(), 2000, seed + 1),
            )
        } else {
            (
                ExperimentConfig::covariance(true, 100, 200, f.clone(), 2000, seed),
                ExperimentConfig::covariance(false, 100, 200, f.clone(), 2000, seed + 1),
            )
        };
        let r = compare_pipelines(&a, &b)?.report;
        pass &= r.verdict.pass;
        parts.push(format!(
            "{}: |Δmean|/SE {:.2}, var ratio {:.3}, KS p {:.3}",
            label(&f),
            r.mean_diff.abs() / r.mean_diff_se,
            r.var_ratio,
            r.ks_p_value
        ));
    }
    Ok((pass, parts.join("; ")))
}

fn bias() -> Outcome {
    let (p, n) = (100usize, 200usize);
    let f = TestFunction::monomial(2)?;
    let report = bias_demonstration(&ExperimentConfig::covariance(true, p, n, f.clone(), 500, 20_240_605))?;
    let exact = (p * p) as f64 / (n * (n - 1)) as f64;
    let bookkeeping = (report.empirical_offset - exact).abs();
    let h = SpectralWeights::point_mass(1.0)?;
    let far = deterministic_centering_gap(&f, 800, 1600, &h)?;
    let approach = (far.finite / far.limit - 1.0).abs();
    let limit_err = (report.gap.limit - 0.25).abs();
    let pass = bookkeeping < 1e-10 && approach < 0.01 && limit_err < 1e-9;
    Ok((
        pass,
        format!(
            "offset {:.10} vs p²/(n(n-1)) (gap {bookkeeping:.1e}); limit {:.10}; n = 1600 gap {:.6} within {:.2}% of limit",
            report.empirical_offset,
            report.gap.limit,
            far.finite,
            100.0 * approach
        ),
    ))
}

fn densities() -> Outcome {
    let mp = CovarianceModel::marchenko_pastur(0.5)?;
    let mp_grid = invert_density(&mp, 1024, DEFAULT_EPS_SCHEDULE)?;
    let mp_mass = density_integral(&mp, &mp_grid, |_| 1.0, 2048, DEFAULT_EPS_SCHEDULE)?;
    let fm = FMatrixModel::from_limits(0.5, 0.25)?;
    let f_grid = invert_density(&fm, 1024, DEFAULT_EPS_SCHEDULE)?;
    let f_mass = density_integral(&fm, &f_grid, |_| 1.0, 2048, DEFAULT_EPS_SCHEDULE)?;
    let (lo, hi) = f_support(0.5, 0.25)?;
    let edge = (f_grid.support_lo - lo).abs().max((f_grid.support_hi - hi).abs());
    let pass = (mp_mass - 1.0).abs() < 1e-4 && (f_mass - 1.0).abs() < 1e-4 && edge < 1e-3;
    Ok((
        pass,
        format!(
            "MP mass {mp_mass:.8}, F mass {f_mass:.8}, F edges ({:.6}, {:.6}) vs ({lo:.6}, {hi:.6})",
            f_grid.support_lo, f_grid.support_hi
        ),
    ))
}

fn label(f: &TestFunction) -> String {
    match f {
        TestFunction::Log => "log".into(),
        TestFunction::Exp => "exp".into(),
        TestFunction::Polynomial { coefficients } if coefficients.len() == 2 => "x".into(),
        TestFunction::Polynomial { coefficients } => format!("x^{}", coefficients.len() - 1),
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")
}

fn main() -> ExitCode {
    let x = || TestFunction::monomial(1).expect("degree 1");
    let x2 = || TestFunction::monomial(2).expect("degree 2");
    let criteria: Vec<Criterion> = vec![
        ("solver matches closed-form MP root", 1, Box::new(solver_oracle)),
        ("finite-n shift converges at rate 1/n", 1, Box::new(shift_convergence)),
        ("shift limit cancels the combined correction", 1, Box::new(cancellation)),
        ("exact decompositions, interlacing and trace bound", 30, Box::new(exact_decompositions)),
        ("F-matrix conditional decomposition identity", 60, Box::new(f_identity)),
        ("lemma Monte Carlo rates and limits", 600, Box::new(lemma_rates)),
        ("exact moments of the trace statistic", 300, Box::new(exact_moments)),
        (
            "covariance pipelines equivalent",
            600,
            Box::new(move || equivalence(false, [x2(), TestFunction::Log], 20_240_610)),
        ),
        (
            "F-matrix pipelines equivalent",
            900,
            Box::new(move || equivalence(true, [x(), TestFunction::Log], 20_240_620)),
        ),
        ("wrong-centering offset and its limit", 60, Box::new(bias)),
        ("densities normalised and F edges located", 30, Box::new(densities)),
    ];

    let mut failures = 0;
    for (k, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (pass, detail) = match outcome {
            Ok((pass, detail)) => (pass && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.1} s, budget {budget} s]",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
