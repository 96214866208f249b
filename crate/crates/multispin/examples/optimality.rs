//! The zero-free radius cannot scale better than 1/sqrt(n): a half-line
//! tilt psi whose Gaussian integral of e^psi vanishes lifts to a Lipschitz
//! factor on the Boolean cube whose partition function acquires a zero of
//! modulus about 2 tau rho / sqrt(n).

use multispin::builders::{calibrate_truncation, optimality_experiment, solve_psi_equation};

fn main() {
    let config = solve_psi_equation(4.0, 1e-10).unwrap();
    println!(
        "tilt slope v = {}  (tau = {:.6}, objective residual {:.2e})",
        config.v, config.tau, config.residual
    );
    let config = calibrate_truncation(&config).unwrap();
    println!(
        "calibrated clamp L = {} with zero inside |z| < {}",
        config.l_trunc, config.rho
    );

    println!("{:>6}  {:>14}  {:>14}  {:>12}", "n", "min |zero|", "2 tau rho/sqrt(n)", "|zero| sqrt(n)");
    let rows = optimality_experiment(&config, &[64, 256, 1024, 4096], 24).unwrap();
    for row in rows {
        match row.min_zero_modulus {
            Some(modulus) => println!(
                "{:>6}  {:>14.8}  {:>14.8}  {:>12.6}",
                row.n,
                modulus,
                row.envelope,
                modulus * (row.n as f64).sqrt()
            ),
            None => println!("{:>6}  {:>14}  {:>14.8}", row.n, "none found", row.envelope),
        }
    }
}
