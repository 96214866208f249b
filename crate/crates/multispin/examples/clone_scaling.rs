//! Cloning each factor k times multiplies the coordinate multiplicity c by
//! k, shrinking the guaranteed zero-free radius by exactly k, while the
//! partition value obeys E e^{lambda f_k} = E e^{k lambda f}.

use multispin::builders::{build_ising, clone_factor_system};
use multispin::exact::exact_partition;
use multispin::spinmodel::{validate_system, zero_free_radius};
use num_complex::Complex64;

fn main() {
    let base = build_ising(2, &[(0, 1, 1.0)], &[]).unwrap();
    let lambda = Complex64::new(0.08, 0.03);
    println!("{:>3}  {:>3}  {:>12}  {:>26}  {:>26}", "k", "c", "radius", "E e^(lambda f_k)", "E e^(k lambda f)");
    for k in 1..=5 {
        let cloned = clone_factor_system(&base, k).unwrap();
        let report = validate_system(&cloned);
        let radius = zero_free_radius(report.r, report.c, 0.0).unwrap();
        let lhs = exact_partition(&cloned, lambda).unwrap();
        let rhs = exact_partition(&base, lambda * k as f64).unwrap();
        println!(
            "{k:>3}  {:>3}  {radius:>12.8}  {lhs:>26}  {rhs:>26}",
            report.c
        );
    }
}
