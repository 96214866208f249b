//! Randomized invariants over generated inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use multispin::exact::exact_partition;
use multispin::interpolate::{exp_series, log_taylor, ComplexSeries};
use multispin::spinmodel::zero_free_radius;

fn small_complex() -> impl Strategy<Value = Complex64> {
    (-0.4f64..0.4, -0.4f64..0.4).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_log_round_trip(tail in proptest::collection::vec(small_complex(), 1..10)) {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        coeffs.extend(tail);
        let degree = coeffs.len() - 1;
        let series = ComplexSeries { coeffs };
        let log = log_taylor(&series, degree).unwrap();
        let back = exp_series(&log, degree);
        for (a, b) in series.coeffs.iter().zip(&back.coeffs) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn radius_monotone_in_r_and_c(r in 2usize..12, c in 1usize..12, delta in 0.0f64..0.9) {
        let base = zero_free_radius(r, c, delta).unwrap();
        prop_assert!(zero_free_radius(r + 1, c, delta).unwrap() <= base);
        prop_assert!(zero_free_radius(r, c + 1, delta).unwrap() < base);
        prop_assert!(zero_free_radius(r, c, 0.0).unwrap() >= base);
        // scaling law: c halves the radius exactly when doubled
        let doubled = zero_free_radius(r, 2 * c, delta).unwrap();
        prop_assert!((doubled - base / 2.0).abs() < 1e-15);
    }

    #[test]
    fn independent_replicas_multiply(seed in 0u64..200, re in -0.1f64..0.1, im in -0.1f64..0.1) {
        // two disjoint copies of a system are independent, so the partition
        // value of the doubled system is the square of the original
        let params = multispin::corpus::CorpusParams {
            max_coordinates: 4,
            max_factors: 3,
            ..Default::default()
        };
        let system = multispin::corpus::random_system(seed, &params);
        let lambda = Complex64::new(re, im);
        let n = system.num_coordinates();
        let value = exact_partition(&system, lambda).unwrap();

        // replica check: duplicating all spaces and factors squares the value
        let mut spaces = system.spaces.clone();
        spaces.extend(system.spaces.iter().cloned());
        let mut factors = system.factors.clone();
        factors.extend(system.factors.iter().map(|f| {
            let mut shifted = f.clone();
            for j in shifted.scope.iter_mut() {
                *j += n;
            }
            shifted
        }));
        let doubled = multispin::spinmodel::SpinSystem::new(spaces, factors);
        let squared = exact_partition(&doubled, lambda).unwrap();
        prop_assert!((squared - value * value).norm() <= 1e-11 * value.norm().powi(2).max(1.0));
    }
}
