use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rmt_lss::ensembles::{centralized_cov, delta_matrix, draw_entries, simplified_cov, EntryLaw, PopulationShape};
use rmt_lss::harness::SummaryStats;
use rmt_lss::seed::derive_seed;
use rmt_lss::stieltjes::{mp_quadratic, solve_companion, Ratio, SpectralWeights, DEFAULT_TOL};

fn law() -> impl Strategy<Value = EntryLaw> {
    prop_oneof![Just(EntryLaw::RealGaussian), Just(EntryLaw::ComplexGaussian), Just(EntryLaw::RealThreepoint)]
}

fn frob(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn centralized_equals_simplified_minus_delta(p in 1usize..12, n in 2usize..30, seed: u64, law in law()) {
        let x = draw_entries(p, n, &law, seed).unwrap();
        let shape = PopulationShape::two_level(p, p / 2).unwrap();
        let (s, _) = centralized_cov(&x, &shape).unwrap();
        let (b, _) = simplified_cov(&x, &shape).unwrap();
        let d = delta_matrix(&x, &shape).unwrap();
        prop_assert!(frob(&(&s - (&b - &d))) <= 1e-12 * frob(&b).max(1e-300));
    }

    #[test]
    fn centralized_cov_ignores_column_shift(p in 1usize..10, n in 2usize..25, seed: u64, shift in -5.0f64..5.0) {
        let x = draw_entries(p, n, &EntryLaw::RealGaussian, seed).unwrap();
        let shifted = x.map(|v| v + Complex64::new(shift, 0.0));
        let (s, _) = centralized_cov(&x, &PopulationShape::Identity).unwrap();
        let (t, _) = centralized_cov(&shifted, &PopulationShape::Identity).unwrap();
        prop_assert!(frob(&(&s - &t)) <= 1e-12 * (1.0 + shift * shift) * frob(&s).max(1.0));
    }

    #[test]
    fn draws_are_reproducible(p in 1usize..8, n in 1usize..8, seed: u64, law in law()) {
        prop_assert_eq!(draw_entries(p, n, &law, seed).unwrap(), draw_entries(p, n, &law, seed).unwrap());
    }

    #[test]
    fn derived_seeds_differ(master: u64, i in 0u64..1_000_000) {
        prop_assert_ne!(derive_seed(master, i), derive_seed(master, i + 1));
    }

    #[test]
    fn solver_agrees_with_closed_form(re in -2.0f64..8.0, im in 1e-3f64..20.0, y in 0.01f64..4.0) {
        let z = Complex64::new(re, im);
        let h = SpectralWeights::point_mass(1.0).unwrap();
        let solved = solve_companion(z, Ratio::limit(y).unwrap(), &h, DEFAULT_TOL).unwrap();
        let closed = mp_quadratic(z, y).unwrap();
        prop_assert!((solved.m_under - closed).norm() <= 1e-10 * closed.norm().max(1.0));
        prop_assert!(solved.m_under.im > 0.0 && solved.m.im > 0.0);
    }

    #[test]
    fn companion_maps_upper_half_plane(re in -2.0f64..12.0, im in 1e-3f64..10.0, y in 0.05f64..3.0, w in 0.05f64..0.95) {
        let h = SpectralWeights::new(vec![1.0, 4.0], vec![w, 1.0 - w]).unwrap();
        let cv = solve_companion(Complex64::new(re, im), Ratio::limit(y).unwrap(), &h, DEFAULT_TOL).unwrap();
        prop_assert!(cv.m_under.im > 0.0);
        prop_assert!(cv.residual <= DEFAULT_TOL);
    }

    #[test]
    fn summary_is_affine_equivariant(values in prop::collection::vec(-10.0f64..10.0, 5..60), a in 0.1f64..5.0, b in -5.0f64..5.0) {
        prop_assume!(values.iter().any(|v| (v - values[0]).abs() > 1e-3));
        let s = SummaryStats::from_samples(&values).unwrap();
        let mapped: Vec<f64> = values.iter().map(|v| a * v + b).collect();
        let t = SummaryStats::from_samples(&mapped).unwrap();
        prop_assert!((t.mean - (a * s.mean + b)).abs() <= 1e-10 * (1.0 + t.mean.abs()));
        prop_assert!((t.variance / (a * a * s.variance) - 1.0).abs() <= 1e-9);
        prop_assert!((t.skewness - s.skewness).abs() <= 1e-8);
        prop_assert!((t.excess_kurtosis - s.excess_kurtosis).abs() <= 1e-8);
    }
}
