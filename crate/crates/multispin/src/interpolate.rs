//! The interpolation approximation pipeline: truncation degree selection,
//! the Taylor polynomial of z -> E e^{lambda z f}, the log-series recursion
//! and the end-to-end driver with a certified error budget.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::moments::{moment_sequence, MomentRequest, MomentSequence};
use crate::spinmodel::{
    default_anchor, magnitude_bounds, shift_factors, validate_system, zero_free_radius,
    ShiftRecord, SpinSystem,
};

/// Hard ceiling on the truncation degree; larger plans fail loudly.
pub const DEGREE_CEILING: usize = 10_000;

/// Coefficients of a univariate polynomial / truncated power series.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSeries {
    pub coeffs: Vec<Complex64>,
}

impl ComplexSeries {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

/// Selected error budget: truncation degree N, interpolation degree k,
/// the disc scale beta = 1/(1 - delta) and the log-scale lower bound of
/// |F| on the closed disc of radius beta.
#[derive(Debug, Clone)]
pub struct ApproxPlan {
    pub lambda: Complex64,
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    pub rho: f64,
    pub truncation_degree: usize,
    pub interpolation_degree: usize,
    pub log_lower_beta: f64,
    pub radius: f64,
}

/// Final approximation with its guarantee. `log_value` is a logarithm w of
/// the value; the guarantee is |w - w_true| <= epsilon_guarantee for some
/// logarithm w_true of the exact partition value. For quadrature-backed
/// moments the residual of the moment integrals is reported separately.
#[derive(Debug, Clone)]
pub struct ApproxReport {
    pub value: Complex64,
    pub log_value: Complex64,
    pub epsilon_guarantee: f64,
    pub plan: ApproxPlan,
    pub shift: ShiftRecord,
    pub quadrature_residual: Option<f64>,
    pub runtime_ms: f64,
}

/// Plan selection shared by the finite and Gaussian drivers.
///
/// rho covers both the sup of |lambda z f| on |z| <= beta and the truncation
/// budget e^{-2 rho} <= (epsilon/4) e^{log_lower_beta}; k is the smallest
/// degree with N / ((k+1)(beta-1) beta^k) <= epsilon/3. The truncation
/// error then stays below the minimum of |F| on the closed beta-disc, so
/// the Taylor polynomial is itself zero-free where the log expansion needs it.
pub(crate) fn plan_from_bounds(
    lambda: Complex64,
    epsilon: f64,
    delta: f64,
    m: usize,
    factor_bound: f64,
    log_lower_beta: f64,
    radius: f64,
) -> Result<ApproxPlan> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon = {epsilon}, need 0 < epsilon < 1")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta = {delta}, need 0 < delta < 1")));
    }
    let modulus = lambda.norm();
    if modulus > radius * (1.0 + 1e-12) {
        return Err(Error::LambdaOutOfRange { modulus, radius });
    }
    let beta = 1.0 / (1.0 - delta);
    let sup_term = modulus * beta * m as f64 * factor_bound;
    let eps_term = 0.5 * ((4.0 / epsilon).ln() - log_lower_beta);
    let rho = sup_term.max(eps_term).max(0.0);
    let n_trunc = (5.0 * rho).ceil() as usize;
    if n_trunc > DEGREE_CEILING {
        return Err(Error::DegreeCeiling {
            degree: n_trunc,
            ceiling: DEGREE_CEILING,
        });
    }
    let k = if m == 0 {
        0
    } else {
        let target = epsilon / 3.0;
        let mut k = 0usize;
        loop {
            let bound = n_trunc as f64 / ((k + 1) as f64 * (beta - 1.0) * beta.powi(k as i32));
            if bound <= target {
                break;
            }
            k += 1;
            if k > DEGREE_CEILING {
                return Err(Error::DegreeCeiling {
                    degree: k,
                    ceiling: DEGREE_CEILING,
                });
            }
        }
        k
    };
    Ok(ApproxPlan {
        lambda,
        epsilon,
        delta,
        beta,
        rho,
        truncation_degree: n_trunc,
        interpolation_degree: k,
        log_lower_beta,
        radius,
    })
}

/// Choose the error budget for one shifted system and admissible lambda.
pub fn choose_plan(
    system: &SpinSystem,
    lambda: Complex64,
    epsilon: f64,
    delta: f64,
) -> Result<ApproxPlan> {
    let r = system.arity();
    let c = system.multiplicity();
    let radius = zero_free_radius(r, c, delta)?;
    let modulus = lambda.norm();
    if modulus > radius * (1.0 + 1e-12) {
        return Err(Error::LambdaOutOfRange { modulus, radius });
    }
    let beta = 1.0 / (1.0 - delta);
    let (_, log_lower_beta) = magnitude_bounds(system, modulus * beta)?;
    plan_from_bounds(
        lambda,
        epsilon,
        delta,
        system.num_factors(),
        system.sup_factor_bound(),
        log_lower_beta,
        radius,
    )
}

/// Taylor coefficients of p_N: coeffs[s] = lambda^s E f^s / s!.
pub fn taylor_polynomial(moments: &MomentSequence, lambda: Complex64, n: usize) -> ComplexSeries {
    assert!(
        moments.values.len() > n,
        "moment sequence shorter than requested degree"
    );
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut scale = Complex64::new(1.0, 0.0); // lambda^s / s!
    for s in 0..=n {
        if s > 0 {
            scale = scale * lambda / s as f64;
        }
        coeffs.push(scale * moments.values[s]);
    }
    ComplexSeries { coeffs }
}

/// Taylor coefficients b_s of log p from the coefficients a_s of p, via
/// s a_s = sum_{j=1..s} j b_j a_{s-j}. The input is padded with zeros when
/// k exceeds its degree; b_0 is the principal logarithm of a_0.
pub fn log_taylor(series: &ComplexSeries, k: usize) -> Result<ComplexSeries> {
    let a0 = *series
        .coeffs
        .first()
        .ok_or(Error::ZeroConstantTerm)?;
    if a0.norm() == 0.0 {
        return Err(Error::ZeroConstantTerm);
    }
    let a = |s: usize| -> Complex64 {
        series
            .coeffs
            .get(s)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    };
    let mut b = Vec::with_capacity(k + 1);
    b.push(a0.ln());
    for s in 1..=k {
        let mut rhs = a(s) * s as f64;
        for j in 1..s {
            rhs -= b[j] * j as f64 * a(s - j);
        }
        b.push(rhs / (a0 * s as f64));
    }
    Ok(ComplexSeries { coeffs: b })
}

/// Inverse of `log_taylor`: exponentiate a log-series to the given degree.
pub fn exp_series(log_series: &ComplexSeries, degree: usize) -> ComplexSeries {
    let b = |s: usize| -> Complex64 {
        log_series
            .coeffs
            .get(s)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    };
    let mut a = Vec::with_capacity(degree + 1);
    a.push(b(0).exp());
    for s in 1..=degree {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=s {
            acc += b(j) * j as f64 * a[s - j];
        }
        a.push(acc / s as f64);
    }
    ComplexSeries { coeffs: a }
}

/// Horner evaluation of a series at z.
pub fn evaluate_interpolant(series: &ComplexSeries, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in series.coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// End-to-end interpolation approximation of E e^{lambda f}.
///
/// The system is shifted at the default anchor, the plan is selected from
/// the shifted magnitude bounds, moments are computed up to min(N, k)
/// (higher coefficients of p_N cannot influence the degree-k log Taylor
/// polynomial), and the shift is undone in log scale at the end.
pub fn approximate_partition(
    system: &SpinSystem,
    lambda: Complex64,
    epsilon: f64,
    delta: f64,
) -> Result<ApproxReport> {
    let start = std::time::Instant::now();
    let report = validate_system(system);
    if !report.structural.is_empty() {
        return Err(Error::Structural(report.structural.join("; ")));
    }
    if !report.lipschitz_ok {
        return Err(Error::Inadmissible(format!(
            "Lipschitz violation of magnitude {}",
            report.worst_violation
        )));
    }
    let anchor = default_anchor(system);
    let (shifted, shift) = shift_factors(system, &anchor)?;
    let plan = choose_plan(&shifted, lambda, epsilon, delta)?;
    let order = plan.truncation_degree.min(plan.interpolation_degree);
    let moments = moment_sequence(&MomentRequest::new(&shifted, order))?;
    let series = taylor_polynomial(&moments, lambda, order);
    let log_series = log_taylor(&series, plan.interpolation_degree)?;
    let t_at_one = evaluate_interpolant(&log_series, Complex64::new(1.0, 0.0));
    let log_value = t_at_one + lambda * shift.gamma;
    Ok(ApproxReport {
        value: log_value.exp(),
        log_value,
        epsilon_guarantee: epsilon,
        plan,
        shift,
        quadrature_residual: None,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
