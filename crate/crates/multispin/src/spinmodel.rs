//! Finite multi-spin systems: product probability spaces with complex
//! low-arity factors, validation, the anchor shift and the closed-form
//! zero-free radius and magnitude bounds.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance on the single-flip Lipschitz check.
pub const LIPSCHITZ_TOL: f64 = 1e-9;
/// Tolerance on probability normalization per space.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// One coordinate: a finite probability space.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    pub size: usize,
    pub probs: Vec<f64>,
}

impl Space {
    pub fn uniform(size: usize) -> Self {
        Space {
            size,
            probs: vec![1.0 / size as f64; size],
        }
    }

    pub fn binary(p_one: f64) -> Self {
        Space {
            size: 2,
            probs: vec![1.0 - p_one, p_one],
        }
    }
}

/// A complex-valued function of a few coordinates, stored as a dense table.
///
/// The table is row-major in scope order: the last scope coordinate varies
/// fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub scope: Vec<usize>,
    pub table: Vec<Complex64>,
}

impl Factor {
    /// Table index for one assignment of the scope coordinates.
    pub fn table_index(&self, states: &[usize], sizes: &[usize]) -> usize {
        debug_assert_eq!(states.len(), self.scope.len());
        let mut idx = 0;
        for (pos, &s) in states.iter().enumerate() {
            idx = idx * sizes[pos] + s;
        }
        idx
    }

    /// Value at a full configuration (one state per system coordinate).
    pub fn value_at(&self, config: &[usize], sizes: &[usize]) -> Complex64 {
        let mut idx = 0;
        for (pos, &coord) in self.scope.iter().enumerate() {
            idx = idx * sizes[pos] + config[coord];
        }
        self.table[idx]
    }

    fn scope_sizes(&self, spaces: &[Space]) -> Vec<usize> {
        self.scope.iter().map(|&j| spaces[j].size).collect()
    }
}

/// A finite multi-spin system: spaces plus factors, with the derived
/// parameters r (max arity, floored at 2), c (max coordinate multiplicity,
/// floored at 1) and q (max space size).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSystem {
    pub spaces: Vec<Space>,
    pub factors: Vec<Factor>,
}

impl SpinSystem {
    pub fn new(spaces: Vec<Space>, factors: Vec<Factor>) -> Self {
        SpinSystem { spaces, factors }
    }

    pub fn num_coordinates(&self) -> usize {
        self.spaces.len()
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Max arity, floored at 2 so the radius formula stays well-defined.
    pub fn arity(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.scope.len())
            .max()
            .unwrap_or(0)
            .max(2)
    }

    /// Max number of factors scoping any one coordinate, floored at 1.
    pub fn multiplicity(&self) -> usize {
        let mut counts = vec![0usize; self.spaces.len()];
        for f in &self.factors {
            for &j in &f.scope {
                if j < counts.len() {
                    counts[j] += 1;
                }
            }
        }
        counts.iter().copied().max().unwrap_or(0).max(1)
    }

    pub fn max_space_size(&self) -> usize {
        self.spaces.iter().map(|s| s.size).max().unwrap_or(1)
    }

    /// Exact sup of |phi_i| over every factor table (0 when m = 0).
    pub fn sup_factor_bound(&self) -> f64 {
        self.factors
            .iter()
            .flat_map(|f| f.table.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Number of full configurations, as f64 to survive overflow.
    pub fn configuration_count(&self) -> f64 {
        self.spaces.iter().map(|s| s.size as f64).product()
    }

    /// f(x) = sum of factor values at a full configuration.
    pub fn f_value(&self, config: &[usize]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for factor in &self.factors {
            let sizes = factor.scope_sizes(&self.spaces);
            acc += factor.value_at(config, &sizes);
        }
        acc
    }

    /// log of the product probability weight of a full configuration.
    pub fn log_weight(&self, config: &[usize]) -> f64 {
        config
            .iter()
            .zip(&self.spaces)
            .map(|(&s, sp)| sp.probs[s].ln())
            .sum()
    }
}

/// Record of the anchor shift: the anchor configuration and
/// gamma = f(anchor) of the original system.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftRecord {
    pub anchor: Vec<usize>,
    pub gamma: Complex64,
}

/// One single-flip Lipschitz violation.
#[derive(Debug, Clone)]
pub struct LipschitzViolation {
    pub factor: usize,
    pub coordinate: usize,
    pub magnitude: f64,
}

/// Outcome of `validate_system`. Structural issues are fatal; Lipschitz
/// violations only mark the system inadmissible for bound/approx work.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub r: usize,
    pub c: usize,
    pub lipschitz_ok: bool,
    pub worst_violation: f64,
    pub structural: Vec<String>,
    pub violations: Vec<LipschitzViolation>,
}

impl ValidationReport {
    pub fn is_admissible(&self) -> bool {
        self.structural.is_empty() && self.lipschitz_ok
    }
}

/// Iterate all assignments over coordinates with the given sizes, row-major
/// (last coordinate varies fastest). Yields nothing extra for sizes = [].
pub(crate) fn for_each_assignment(sizes: &[usize], mut visit: impl FnMut(&[usize])) {
    let mut state = vec![0usize; sizes.len()];
    if sizes.iter().any(|&s| s == 0) {
        return;
    }
    loop {
        visit(&state);
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            state[pos] += 1;
            if state[pos] < sizes[pos] {
                break;
            }
            state[pos] = 0;
        }
    }
}

/// Check every invariant of a spin system and report the derived parameters.
pub fn validate_system(system: &SpinSystem) -> ValidationReport {
    let n = system.num_coordinates();
    let mut structural = Vec::new();

    for (j, space) in system.spaces.iter().enumerate() {
        if space.size == 0 {
            structural.push(format!("space {j} has size 0"));
            continue;
        }
        if space.probs.len() != space.size {
            structural.push(format!(
                "space {j}: probs length {} != size {}",
                space.probs.len(),
                space.size
            ));
            continue;
        }
        if space.probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            structural.push(format!("space {j} has a negative or non-finite probability"));
        }
        let sum: f64 = space.probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            structural.push(format!("space {j}: probabilities sum to {sum}, not 1"));
        }
    }

    let mut violations = Vec::new();
    let mut worst = 0.0f64;
    let mut lipschitz_ok = true;

    for (i, factor) in system.factors.iter().enumerate() {
        let mut scope_ok = true;
        for &j in &factor.scope {
            if j >= n {
                structural.push(format!("factor {i}: scope index {j} out of range"));
                scope_ok = false;
            }
        }
        let mut sorted = factor.scope.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != factor.scope.len() {
            structural.push(format!("factor {i}: repeated scope index"));
            scope_ok = false;
        }
        if !scope_ok {
            continue;
        }
        let sizes = factor.scope_sizes(&system.spaces);
        let expect: usize = sizes.iter().product();
        if factor.table.len() != expect {
            structural.push(format!(
                "factor {i}: table length {} != scope product {expect}",
                factor.table.len()
            ));
            continue;
        }

        // Single-flip Lipschitz check: for every scope position, every pair
        // of its states, every assignment of the remaining scope coordinates.
        for pos in 0..factor.scope.len() {
            let mut rest_sizes = sizes.clone();
            rest_sizes.remove(pos);
            let mut factor_worst = 0.0f64;
            for_each_assignment(&rest_sizes, |rest| {
                let mut states = vec![0usize; sizes.len()];
                for (k, &v) in rest.iter().enumerate() {
                    let slot = if k < pos { k } else { k + 1 };
                    states[slot] = v;
                }
                for a in 0..sizes[pos] {
                    for b in (a + 1)..sizes[pos] {
                        states[pos] = a;
                        let va = factor.table[factor.table_index(&states, &sizes)];
                        states[pos] = b;
                        let vb = factor.table[factor.table_index(&states, &sizes)];
                        let delta = (va - vb).norm();
                        factor_worst = factor_worst.max(delta);
                    }
                }
            });
            if factor_worst > 1.0 + LIPSCHITZ_TOL {
                lipschitz_ok = false;
                worst = worst.max(factor_worst);
                violations.push(LipschitzViolation {
                    factor: i,
                    coordinate: factor.scope[pos],
                    magnitude: factor_worst,
                });
            }
        }
    }

    ValidationReport {
        n,
        m: system.num_factors(),
        q: system.max_space_size(),
        r: system.arity(),
        c: system.multiplicity(),
        lipschitz_ok,
        worst_violation: worst,
        structural,
        violations,
    }
}

/// Replace each factor by phi_i - phi_i(anchor restricted to its scope) and
/// record gamma = sum phi_i(anchor), so f(anchor) = 0 afterwards and
/// E e^{lambda f_shifted} = e^{-lambda gamma} E e^{lambda f}.
pub fn shift_factors(system: &SpinSystem, anchor: &[usize]) -> Result<(SpinSystem, ShiftRecord)> {
    if anchor.len() != system.num_coordinates() {
        return Err(Error::Structural(format!(
            "anchor length {} != number of coordinates {}",
            anchor.len(),
            system.num_coordinates()
        )));
    }
    for (j, &s) in anchor.iter().enumerate() {
        if s >= system.spaces[j].size {
            return Err(Error::Structural(format!(
                "anchor state {s} out of range for coordinate {j}"
            )));
        }
    }
    let mut gamma = Complex64::new(0.0, 0.0);
    let mut factors = Vec::with_capacity(system.factors.len());
    for factor in &system.factors {
        let sizes = factor.scope_sizes(&system.spaces);
        let at_anchor = factor.value_at(anchor, &sizes);
        gamma += at_anchor;
        factors.push(Factor {
            scope: factor.scope.clone(),
            table: factor.table.iter().map(|&v| v - at_anchor).collect(),
        });
    }
    Ok((
        SpinSystem {
            spaces: system.spaces.clone(),
            factors,
        },
        ShiftRecord {
            anchor: anchor.to_vec(),
            gamma,
        },
    ))
}

/// Deterministic default anchor: every coordinate in its first state.
pub fn default_anchor(system: &SpinSystem) -> Vec<usize> {
    vec![0; system.num_coordinates()]
}

/// Zero-free radius (1 - delta) / (3 c sqrt(r - 1)).
pub fn zero_free_radius(r: usize, c: usize, delta: f64) -> Result<f64> {
    if r < 2 {
        return Err(Error::Domain(format!("r = {r}, need r >= 2")));
    }
    if c < 1 {
        return Err(Error::Domain(format!("c = {c}, need c >= 1")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("delta = {delta}, need 0 <= delta < 1")));
    }
    Ok((1.0 - delta) / (3.0 * c as f64 * ((r - 1) as f64).sqrt()))
}

/// Log-scale magnitude bounds on |E e^{lambda f}| for a shifted system:
/// upper = |lambda| m L, lower = -|lambda| m L + n ln cos(pi / 4 sqrt(r-1)),
/// with L the exact sup over the factor tables. With m = 0 the value is
/// exactly 1, so both bounds are 0.
pub fn magnitude_bounds(system: &SpinSystem, lambda_modulus: f64) -> Result<(f64, f64)> {
    let r = system.arity();
    let c = system.multiplicity();
    let radius = zero_free_radius(r, c, 0.0)?;
    if lambda_modulus > radius * (1.0 + 1e-12) {
        return Err(Error::LambdaOutOfRange {
            modulus: lambda_modulus,
            radius,
        });
    }
    let m = system.num_factors() as f64;
    if system.num_factors() == 0 {
        return Ok((0.0, 0.0));
    }
    let l = system.sup_factor_bound();
    let n = system.num_coordinates() as f64;
    let cos_term = (std::f64::consts::PI / (4.0 * ((r - 1) as f64).sqrt())).cos();
    let log_upper = lambda_modulus * m * l;
    let log_lower = -lambda_modulus * m * l + n * cos_term.ln();
    Ok((log_upper, log_lower))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The running two-coordinate example: phi(x1, x2) = x1 x2 / 2 over
    /// uniform {-1, 1} states (state 0 -> -1, state 1 -> +1).
    pub(crate) fn half_product_system() -> SpinSystem {
        let table = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(a, b)| {
                let sa = if a == 0 { -1.0 } else { 1.0 };
                let sb = if b == 0 { -1.0 } else { 1.0 };
                Complex64::new(sa * sb / 2.0, 0.0)
            })
            .collect();
        SpinSystem::new(
            vec![Space::uniform(2), Space::uniform(2)],
            vec![Factor {
                scope: vec![0, 1],
                table,
            }],
        )
    }

    #[test]
    fn validates_half_product_system() {
        let report = validate_system(&half_product_system());
        assert!(report.is_admissible());
        assert!(report.lipschitz_ok);
        assert_eq!(report.r, 2);
        assert_eq!(report.c, 1);
        assert_eq!(report.n, 2);
        assert_eq!(report.m, 1);
    }

    #[test]
    fn rejects_scaled_factor() {
        let mut system = half_product_system();
        for v in &mut system.factors[0].table {
            *v *= 3.0;
        }
        let report = validate_system(&system);
        assert!(!report.lipschitz_ok);
        assert!((report.worst_violation - 3.0).abs() < 1e-12);
        assert!(!report.is_admissible());
    }

    #[test]
    fn empty_factor_list_is_valid() {
        let system = SpinSystem::new(vec![Space::uniform(2)], vec![]);
        let report = validate_system(&system);
        assert!(report.is_admissible());
        assert_eq!(report.m, 0);
        assert_eq!(report.r, 2);
        assert_eq!(report.c, 1);
    }

    #[test]
    fn structural_errors_are_fatal() {
        let system = SpinSystem::new(
            vec![Space::uniform(2)],
            vec![Factor {
                scope: vec![3],
                table: vec![Complex64::new(0.0, 0.0); 2],
            }],
        );
        let report = validate_system(&system);
        assert!(!report.structural.is_empty());
        assert!(!report.is_admissible());
    }

    #[test]
    fn shift_constant_factor() {
        let system = SpinSystem::new(
            vec![Space::uniform(2)],
            vec![Factor {
                scope: vec![0],
                table: vec![Complex64::new(5.0, 0.0); 2],
            }],
        );
        let (shifted, record) = shift_factors(&system, &[0]).unwrap();
        assert_eq!(record.gamma, Complex64::new(5.0, 0.0));
        assert!(shifted.factors[0].table.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn shift_half_product_at_minus_minus() {
        let system = half_product_system();
        let (shifted, record) = shift_factors(&system, &[0, 0]).unwrap();
        assert!((record.gamma - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        for (orig, sh) in system.factors[0].table.iter().zip(&shifted.factors[0].table) {
            assert!((sh - (orig - Complex64::new(0.5, 0.0))).norm() < 1e-15);
        }
        assert!(shifted.f_value(&[0, 0]).norm() < 1e-15);
    }

    #[test]
    fn shift_empty_system() {
        let system = SpinSystem::new(vec![Space::uniform(3)], vec![]);
        let (shifted, record) = shift_factors(&system, &[1]).unwrap();
        assert_eq!(record.gamma, Complex64::new(0.0, 0.0));
        assert_eq!(shifted, system);
    }

    #[test]
    fn shift_rejects_bad_anchor() {
        let system = half_product_system();
        assert!(shift_factors(&system, &[0, 5]).is_err());
        assert!(shift_factors(&system, &[0]).is_err());
    }

    #[test]
    fn radius_values() {
        assert!((zero_free_radius(2, 3, 0.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!((zero_free_radius(5, 2, 0.0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((zero_free_radius(2, 1, 0.5).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!(zero_free_radius(1, 1, 0.0).is_err());
        assert!(zero_free_radius(2, 0, 0.0).is_err());
        assert!(zero_free_radius(2, 1, 1.0).is_err());
    }

    #[test]
    fn radius_monotone_and_halving() {
        let base = zero_free_radius(2, 2, 0.0).unwrap();
        assert!(zero_free_radius(3, 2, 0.0).unwrap() < base);
        assert!(zero_free_radius(2, 3, 0.0).unwrap() < base);
        assert!((zero_free_radius(2, 4, 0.0).unwrap() - base / 2.0).abs() < 1e-15);
    }

    #[test]
    fn magnitude_bounds_basic() {
        // r = 2, n = 3, m = 2, L = 1, |lambda| = 0.1.
        let phi = Factor {
            scope: vec![0],
            table: vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)],
        };
        let mut phi2 = phi.clone();
        phi2.scope = vec![1];
        let system = SpinSystem::new(vec![Space::uniform(2); 3], vec![phi, phi2]);
        let (up, lo) = magnitude_bounds(&system, 0.1).unwrap();
        assert!((up - 0.2).abs() < 1e-15);
        let expected = -0.2 + 3.0 * (std::f64::consts::FRAC_PI_4.cos()).ln();
        assert!((lo - expected).abs() < 1e-12);
        // e^{-0.2} (cos pi/4)^3 ~ 0.28947
        assert!((lo.exp() - 0.28947).abs() < 1e-4);
    }

    #[test]
    fn magnitude_bounds_edge_cases() {
        let empty = SpinSystem::new(vec![Space::uniform(2); 4], vec![]);
        assert_eq!(magnitude_bounds(&empty, 0.05).unwrap(), (0.0, 0.0));

        let system = half_product_system();
        let (up, lo) = magnitude_bounds(&system, 0.0).unwrap();
        assert_eq!(up, 0.0);
        let expected = 2.0 * (std::f64::consts::FRAC_PI_4.cos()).ln();
        assert!((lo - expected).abs() < 1e-12);

        assert!(magnitude_bounds(&system, 10.0).is_err());
    }

    #[test]
    fn shift_preserves_validation() {
        let system = half_product_system();
        let before = validate_system(&system);
        let (shifted, _) = shift_factors(&system, &[1, 0]).unwrap();
        let after = validate_system(&shifted);
        assert_eq!(before.is_admissible(), after.is_admissible());
        assert_eq!(before.lipschitz_ok, after.lipschitz_ok);
    }
}
