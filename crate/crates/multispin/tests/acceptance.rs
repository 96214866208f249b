//! End-to-end acceptance suite: one test per criterion, each printing a
//! single pass line (run with --nocapture to see them).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use multispin::builders;
use multispin::corpus::{random_system, CorpusParams};
use multispin::exact::{exact_partition, scan_zeros};
use multispin::gaussian::{
    self, approximate_gaussian_partition, exact_gaussian_partition, gaussian_grid_evaluator,
    gaussian_magnitude_bounds, gaussian_zero_free_radius, QuadratureRule,
};
use multispin::interpolate::{
    approximate_partition, evaluate_interpolant, exp_series, log_taylor, ComplexSeries,
};
use multispin::spinmodel::{
    magnitude_bounds, shift_factors, validate_system, zero_free_radius, SpinSystem,
};

/// Difference of two logarithms of the same nonzero value, branch-agnostic.
fn log_gap(a: Complex64, b: Complex64) -> f64 {
    let mut im = a.im - b.im;
    let two_pi = 2.0 * std::f64::consts::PI;
    while im > std::f64::consts::PI {
        im -= two_pi;
    }
    while im < -std::f64::consts::PI {
        im += two_pi;
    }
    Complex64::new(a.re - b.re, im).norm()
}

/// First `count` seeded draws within the arity/multiplicity envelope.
fn corpus(count: usize) -> Vec<SpinSystem> {
    let params = CorpusParams::default();
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        let system = random_system(seed, &params);
        seed += 1;
        let report = validate_system(&system);
        if report.r <= 3 && report.c <= 3 && report.is_admissible() {
            out.push(system);
        }
    }
    out
}

#[test]
fn criterion_1_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let delta = 0.1;
    for (i, system) in corpus(50).iter().enumerate() {
        let report = validate_system(system);
        let radius = zero_free_radius(report.r, report.c, delta).unwrap();
        let exact_at = |lambda| exact_partition(system, lambda).unwrap();
        for _ in 0..4 {
            let modulus = rng.gen_range(0.0..0.9 * radius);
            let phase = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            let lambda = Complex64::from_polar(modulus, phase);
            let truth = exact_at(lambda).ln();
            for &epsilon in &[1e-2, 1e-4] {
                let approx = approximate_partition(system, lambda, epsilon, delta).unwrap();
                let gap = log_gap(approx.log_value, truth);
                assert!(
                    gap <= epsilon,
                    "system {i}, lambda {lambda}, epsilon {epsilon}: log gap {gap}"
                );
            }
        }
    }
    println!("criterion 1 (oracle equivalence on random corpus): pass");
}

#[test]
fn criterion_2_zero_freeness_and_bounds() {
    for (i, system) in corpus(50).iter().enumerate() {
        let report = validate_system(system);
        let radius = zero_free_radius(report.r, report.c, 0.0).unwrap();
        for k in 0..32 {
            let phase = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
            let lambda = Complex64::from_polar(radius, phase);
            let value = exact_partition(system, lambda).unwrap();
            let (upper, lower) = magnitude_bounds(system, radius).unwrap();
            let ln_mod = value.norm().ln();
            assert!(
                ln_mod >= lower - 1e-9 && ln_mod <= upper + 1e-9,
                "system {i}: ln|F| = {ln_mod} outside [{lower}, {upper}]"
            );
        }
        let scan = scan_zeros(system, radius, 12).unwrap();
        assert!(
            scan.zeros.is_empty(),
            "system {i}: zero found inside the zero-free disc"
        );
    }
    println!("criterion 2 (zero-freeness and magnitude bounds): pass");
}

#[test]
fn criterion_3_log_interpolation_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for &beta in &[1.25f64, 2.0] {
        for _ in 0..50 {
            let degree = rng.gen_range(1..=30usize);
            let roots: Vec<Complex64> = (0..degree)
                .map(|_| {
                    Complex64::from_polar(
                        rng.gen_range(beta..3.0 * beta),
                        rng.gen_range(0.0..2.0 * std::f64::consts::PI),
                    )
                })
                .collect();
            // p(z) = prod (1 - z / root), so p(0) = 1
            let mut coeffs = vec![Complex64::new(1.0, 0.0)];
            for root in &roots {
                let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
                for (s, &c) in coeffs.iter().enumerate() {
                    next[s] += c;
                    next[s + 1] -= c / root;
                }
                coeffs = next;
            }
            let series = ComplexSeries { coeffs };
            for k in 2..=12usize {
                let t_k = log_taylor(&series, k).unwrap();
                let bound =
                    degree as f64 / ((k + 1) as f64 * (beta - 1.0) * beta.powi(k as i32));
                let mut worst = 0.0f64;
                for g in 0..128 {
                    let z = Complex64::from_polar(
                        1.0,
                        2.0 * std::f64::consts::PI * g as f64 / 128.0,
                    );
                    let log_p: Complex64 =
                        roots.iter().map(|r| (Complex64::new(1.0, 0.0) - z / r).ln()).sum();
                    worst = worst.max((log_p - evaluate_interpolant(&t_k, z)).norm());
                }
                assert!(
                    worst <= bound * (1.0 + 1e-9),
                    "degree {degree}, beta {beta}, k {k}: error {worst} > bound {bound}"
                );
            }
        }
    }
    println!("criterion 3 (log-Taylor error bound on zero-free polynomials): pass");
}

#[test]
fn criterion_4_taylor_truncation_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for &rho in &[0.5f64, 1.0, 2.0] {
        let n = (5.0 * rho).ceil() as usize;
        // random two-point distributions with |lambda f| = rho exactly
        for _ in 0..20 {
            let p = rng.gen_range(0.1..0.9);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let f_values = [rho * sign, -rho * sign];
            let truth = |z: Complex64| {
                (z * f_values[0]).exp() * p + (z * f_values[1]).exp() * (1.0 - p)
            };
            // Taylor coefficients of E e^{z f}: moments of f over the series
            let mut coeffs = Vec::with_capacity(n + 1);
            let mut fact = 1.0f64;
            for s in 0..=n {
                if s > 0 {
                    fact *= s as f64;
                }
                let moment = f_values[0].powi(s as i32) * p
                    + f_values[1].powi(s as i32) * (1.0 - p);
                coeffs.push(Complex64::new(moment / fact, 0.0));
            }
            let series = ComplexSeries { coeffs };
            for g in 0..128 {
                let z =
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * g as f64 / 128.0);
                let gap = (truth(z) - evaluate_interpolant(&series, z)).norm();
                assert!(
                    gap <= (-2.0 * rho).exp(),
                    "rho {rho}: truncation error {gap} > e^(-2 rho)"
                );
            }
        }
    }
    println!("criterion 4 (degree-5rho truncation within e^(-2 rho)): pass");
}

#[test]
fn criterion_5_matching_tilt() {
    let single = builders::Hypergraph {
        num_vertices: 2,
        edges: vec![vec![0, 1]],
    };
    let tilt = builders::build_matching_tilt(&single, 1.0, &[0.5]).unwrap();
    let value = exact_partition(&tilt.system, Complex64::new(1.0, 0.0)).unwrap();
    assert!((value.re - (1.0 + (-2.0f64).exp()) / 2.0).abs() < 1e-12);

    let cycle = builders::Hypergraph {
        num_vertices: 4,
        edges: vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    };
    let tilt = builders::build_matching_tilt(&cycle, 10.0, &[0.5; 4]).unwrap();
    let value = exact_partition(&tilt.system, Complex64::new(10.0, 0.0)).unwrap();
    assert!((16.0 * value.re - 2.0).abs() <= 1e-3);

    let triangle = builders::Hypergraph {
        num_vertices: 3,
        edges: vec![vec![0, 1], vec![1, 2], vec![2, 0]],
    };
    let tilt = builders::build_matching_tilt(&triangle, 10.0, &[0.5; 3]).unwrap();
    let value = exact_partition(&tilt.system, Complex64::new(10.0, 0.0)).unwrap();
    // no perfect matching: nothing survives the tilt except damped terms
    assert!(8.0 * value.re <= 1e-3);

    // approximation agreement at an admissible tilt strength
    for h in [&single, &cycle] {
        let probs = vec![0.5; h.edges.len()];
        let tilt = builders::build_matching_tilt(h, 1e-3, &probs).unwrap();
        let mu = 0.9 * tilt.radius;
        let lambda = Complex64::new(mu, 0.0);
        let truth = exact_partition(&tilt.system, lambda).unwrap().ln();
        for &epsilon in &[1e-2, 1e-4] {
            let approx = approximate_partition(&tilt.system, lambda, epsilon, 0.1).unwrap();
            let gap = log_gap(approx.log_value, truth);
            assert!(gap <= epsilon, "matching approx gap {gap} > {epsilon}");
        }
    }
    println!("criterion 5 (tilted perfect-matching sums): pass");
}

#[test]
fn criterion_6_gaussian_engine() {
    // quadrature sanity on the polynomial-exact rule
    let rule = QuadratureRule::gauss_hermite(64);
    let s0: f64 = rule.weights.iter().sum();
    let s2: f64 = rule.weights.iter().zip(&rule.nodes).map(|(w, x)| w * x * x).sum();
    let s4: f64 = rule
        .weights
        .iter()
        .zip(&rule.nodes)
        .map(|(w, x)| w * x.powi(4))
        .sum();
    assert!((s0 - 1.0).abs() < 1e-12 && (s2 - 1.0).abs() < 1e-12 && (s4 - 3.0).abs() < 1e-12);

    // E|x| at 64 nodes on the kink-aware composite rule
    let composite = QuadratureRule::kink_resilient(64);
    let model = builders::build_abs_integrand(1).unwrap();
    let e_abs: f64 = composite
        .nodes
        .iter()
        .zip(&composite.weights)
        .map(|(&x, &w)| w * x.abs())
        .sum();
    assert!((e_abs - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-8);

    // interpolation vs dense oracle on e^{lambda ||x| - 1|}
    let lambda = Complex64::new(0.1, 0.0);
    let approx = approximate_gaussian_partition(&model, lambda, 1e-3, 0.1, None, &composite).unwrap();
    let truth = exact_gaussian_partition(&model, lambda, 64).unwrap();
    let gap = log_gap(approx.log_value, truth.ln());
    let budget = 1e-3 + approx.quadrature_residual.unwrap();
    assert!(gap <= budget, "gaussian approx gap {gap} > {budget}");

    // zero-free grid over the Theorem-radius disc for the n = 2 model
    let model2 = builders::build_abs_integrand(2).unwrap();
    let radius = gaussian_zero_free_radius(model2.arity(), model2.multiplicity(), 0.0).unwrap();
    let grid_rule = QuadratureRule::adapted_to(&model2, 64);
    let evaluator = gaussian_grid_evaluator(&model2, &grid_rule);
    let level = gaussian::default_truncation_level(&model2, &grid_rule);
    let (_, log_lower) = gaussian_magnitude_bounds(&model2, level, radius).unwrap();
    let floor = log_lower.exp();
    for i in 0..64 {
        for j in 0..64 {
            let z = Complex64::new(
                -radius + 2.0 * radius * i as f64 / 63.0,
                -radius + 2.0 * radius * j as f64 / 63.0,
            );
            if z.norm() > radius {
                continue;
            }
            let modulus = evaluator.eval(z).norm();
            assert!(
                modulus >= floor - 1e-6,
                "grid zero suspect at {z}: |F| = {modulus}, floor {floor}"
            );
        }
    }
    println!("criterion 6 (Gaussian quadrature, oracle agreement, zero-free grid): pass");
}

#[test]
fn criterion_7_optimality_experiment() {
    let config = builders::solve_psi_equation(4.0, 1e-10).unwrap();
    assert!(config.residual <= 1e-10, "residual {}", config.residual);
    let config = builders::calibrate_truncation(&config).unwrap();
    let ns = [64usize, 256, 1024];
    let rows = builders::optimality_experiment(&config, &ns, 24).unwrap();
    let moduli: Vec<f64> = rows
        .iter()
        .map(|r| r.min_zero_modulus.expect("zero not found"))
        .collect();
    assert!(moduli[0] > moduli[1] && moduli[1] > moduli[2], "{moduli:?}");
    let last = rows.last().unwrap();
    assert!(
        moduli[2] < last.envelope,
        "modulus {} not below envelope {}",
        moduli[2],
        last.envelope
    );
    let scaled: Vec<f64> = rows
        .iter()
        .zip(&moduli)
        .map(|(r, m)| m * (r.n as f64).sqrt())
        .collect();
    let (lo, hi) = scaled
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    assert!(hi / lo < 1.5, "scaled moduli vary too much: {scaled:?}");
    println!("criterion 7 (nearest-zero 1/sqrt(n) decay experiment): pass");
}

#[test]
fn criterion_8_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    // clone identity on small corpus draws
    let params = CorpusParams {
        max_coordinates: 8,
        ..CorpusParams::default()
    };
    let mut checked = 0;
    let mut seed = 100u64;
    while checked < 10 {
        let system = random_system(seed, &params);
        seed += 1;
        if system.configuration_count() > 3.0f64.powi(8) {
            continue;
        }
        for k in 1..=4usize {
            let cloned = builders::clone_factor_system(&system, k).unwrap();
            let lambda = Complex64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
            let lhs = exact_partition(&cloned, lambda).unwrap();
            let rhs = exact_partition(&system, lambda * k as f64).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
        checked += 1;
    }

    // exp(log(series)) round-trip
    for _ in 0..20 {
        let coeffs: Vec<Complex64> = std::iter::once(Complex64::new(1.0, 0.0))
            .chain((0..10).map(|_| {
                Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3))
            }))
            .collect();
        let series = ComplexSeries { coeffs };
        let log = log_taylor(&series, 10).unwrap();
        let back = exp_series(&log, 10);
        for (a, b) in series.coeffs.iter().zip(&back.coeffs) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    // shift round-trip: E e^{lambda f} = e^{lambda gamma} E e^{lambda f_shifted}
    for system in corpus(10) {
        let anchor = multispin::spinmodel::default_anchor(&system);
        let (shifted, record) = shift_factors(&system, &anchor).unwrap();
        let lambda = Complex64::new(0.07, -0.04);
        let original = exact_partition(&system, lambda).unwrap();
        let recovered =
            exact_partition(&shifted, lambda).unwrap() * (lambda * record.gamma).exp();
        assert!((original - recovered).norm() <= 1e-12 * original.norm().max(1.0));
    }
    println!("criterion 8 (clone, series round-trip, shift identities): pass");
}
