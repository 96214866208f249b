//! Gaussian-measure engine: a closed catalog of l1-Lipschitz low-arity
//! factors over standard Gaussian coordinates, quadrature moments, the
//! radial truncation operator, the 1/(6 c sqrt(r-1)) radius and bounds,
//! and the interpolation driver with an honestly reported quadrature
//! residual.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::PartitionEvaluator;
use crate::interpolate::{
    evaluate_interpolant, log_taylor, plan_from_bounds, taylor_polynomial, ApproxPlan,
    ApproxReport,
};
use crate::moments::{multiset_power_moments, MomentSequence};
use crate::spinmodel::{for_each_assignment, ShiftRecord};

/// Tolerance on analytic Lipschitz certificates.
const CERT_TOL: f64 = 1e-12;

/// Per-expectation budget on tensor-quadrature evaluations.
pub const DEFAULT_QUAD_COST_CEILING: f64 = 1e9;

/// A 1D quadrature rule for the standard Gaussian density
/// (probabilists' normalization: sum w = 1, sum w x^2 = 1).
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Gauss-Hermite rule with d nodes, exact for polynomials of degree
    /// <= 2d - 1 under the standard Gaussian. Built by Golub-Welsch on the
    /// probabilists' Jacobi matrix (off-diagonals sqrt(k)).
    pub fn gauss_hermite(d: usize) -> Self {
        assert!(d >= 1);
        let mut jacobi = nalgebra::DMatrix::<f64>::zeros(d, d);
        for k in 1..d {
            let b = (k as f64).sqrt();
            jacobi[(k - 1, k)] = b;
            jacobi[(k, k - 1)] = b;
        }
        let eigen = nalgebra::SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..d)
            .map(|i| (eigen.eigenvalues[i], eigen.eigenvectors[(0, i)].powi(2)))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        QuadratureRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Composite Gauss-Legendre rule against the Gaussian density with a
    /// panel boundary at the origin, so integrands with a kink at 0 (such
    /// as |x|) still converge fast. Uses 4 panels per half-line on
    /// [0, 10]; the node count is rounded to a multiple of 8.
    pub fn kink_resilient(nodes_per_axis: usize) -> Self {
        Self::composite(nodes_per_axis, &[])
    }

    /// `kink_resilient` with extra panel boundaries at the given positive
    /// abscissas (mirrored to the negative half-line), so factors with
    /// axis-aligned derivative kinks keep spectral convergence.
    pub fn composite(nodes_per_axis: usize, breakpoints: &[f64]) -> Self {
        let mut edges = vec![0.0, 1.5, 3.5, 6.5, 10.0];
        for &b in breakpoints {
            let b = b.abs();
            if b > 1e-12 && b < 10.0 && edges.iter().all(|&e| (e - b).abs() > 1e-9) {
                edges.push(b);
            }
        }
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let order = (nodes_per_axis / (2 * (edges.len() - 1))).max(2);
        let (gl_nodes, gl_weights) = gauss_legendre(order);
        let density = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut half_nodes = Vec::new();
        let mut half_weights = Vec::new();
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            for (&t, &w) in gl_nodes.iter().zip(&gl_weights) {
                let x = 0.5 * (b - a) * t + 0.5 * (a + b);
                half_nodes.push(x);
                half_weights.push(0.5 * (b - a) * w * density(x));
            }
        }
        let mut nodes: Vec<f64> = half_nodes.iter().rev().map(|&x| -x).collect();
        nodes.extend(&half_nodes);
        let mut weights: Vec<f64> = half_weights.iter().rev().copied().collect();
        weights.extend(&half_weights);
        QuadratureRule { nodes, weights }
    }

    /// A composite rule whose panel edges include every axis-aligned kink
    /// of the model's single-coordinate factors, for dense oracles that
    /// need the node-doubling refinement to actually converge.
    pub fn adapted_to(model: &GaussianModel, nodes_per_axis: usize) -> Self {
        let mut breakpoints = Vec::new();
        for factor in &model.factors {
            if factor.scope.len() != 1 {
                continue;
            }
            match &factor.kind {
                GaussianFactorKind::AbsLinear { coeffs, offset } => {
                    if coeffs[0] != 0.0 {
                        breakpoints.push(-offset / coeffs[0]);
                    }
                }
                GaussianFactorKind::PiecewiseLinearOfSum { knots, .. } => {
                    breakpoints.extend(knots.iter().copied());
                }
                GaussianFactorKind::EuclideanDistance { .. } => {}
            }
        }
        Self::composite(nodes_per_axis, &breakpoints)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for i in 0..order {
        // Chebyshev initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=order {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[order - 1 - i] = x;
        weights[order - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Catalog of factor shapes with analytic l1-Lipschitz certificates.
#[derive(Debug, Clone, PartialEq)]
pub enum GaussianFactorKind {
    /// |a . x_S + b| with sum |a| <= 1.
    AbsLinear { coeffs: Vec<f64>, offset: f64 },
    /// Euclidean distance between two coordinate blocks of equal dimension.
    EuclideanDistance { block_dim: usize },
    /// psi(sum_{j in S} x_j) for a piecewise-linear psi with |slope| <= 1.
    /// `slopes` has one more entry than `knots`; `value_at_zero` anchors psi.
    PiecewiseLinearOfSum {
        knots: Vec<f64>,
        slopes: Vec<f64>,
        value_at_zero: f64,
    },
}

/// One factor: catalog shape, scope, optional radial truncation and the
/// shift offset subtracted after truncation (0 for unshifted factors).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFactor {
    pub kind: GaussianFactorKind,
    pub scope: Vec<usize>,
    pub truncation: Option<f64>,
    pub offset: f64,
}

impl GaussianFactor {
    pub fn new(kind: GaussianFactorKind, scope: Vec<usize>) -> Self {
        GaussianFactor {
            kind,
            scope,
            truncation: None,
            offset: 0.0,
        }
    }

    /// Untruncated, unshifted value at a scope-ordered point.
    pub fn raw(&self, x: &[f64]) -> f64 {
        match &self.kind {
            GaussianFactorKind::AbsLinear { coeffs, offset } => {
                let dot: f64 = coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
                (dot + offset).abs()
            }
            GaussianFactorKind::EuclideanDistance { block_dim } => {
                let (u, v) = x.split_at(*block_dim);
                u.iter()
                    .zip(v)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            }
            GaussianFactorKind::PiecewiseLinearOfSum {
                knots,
                slopes,
                value_at_zero,
            } => {
                let t: f64 = x.iter().sum();
                piecewise_linear(knots, slopes, *value_at_zero, t)
            }
        }
    }

    /// Truncated, shifted value at a scope-ordered point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let v = self.raw(x);
        let v = match self.truncation {
            Some(l) => v.clamp(-l, l),
            None => v,
        };
        v - self.offset
    }

    /// Analytic l1-Lipschitz constant from the catalog parameters.
    pub fn lipschitz_constant(&self) -> f64 {
        match &self.kind {
            GaussianFactorKind::AbsLinear { coeffs, .. } => {
                coeffs.iter().map(|a| a.abs()).fold(0.0, f64::max)
            }
            GaussianFactorKind::EuclideanDistance { .. } => 1.0,
            GaussianFactorKind::PiecewiseLinearOfSum { slopes, .. } => {
                slopes.iter().map(|s| s.abs()).fold(0.0, f64::max)
            }
        }
    }
}

/// Evaluate a piecewise-linear function anchored at t = 0 by integrating
/// its slope field across the knots.
fn piecewise_linear(knots: &[f64], slopes: &[f64], value_at_zero: f64, t: f64) -> f64 {
    // region index of a point: number of knots strictly below it
    let region = |p: f64| knots.iter().filter(|&&k| k <= p).count();
    let (lo, hi, sign) = if t >= 0.0 { (0.0, t, 1.0) } else { (t, 0.0, -1.0) };
    let mut acc = 0.0;
    let mut cursor = lo;
    let mut reg = region(lo);
    while cursor < hi {
        let next_knot = knots.get(reg).copied().unwrap_or(f64::INFINITY);
        let segment_end = next_knot.min(hi);
        acc += slopes[reg] * (segment_end - cursor);
        cursor = segment_end;
        reg += 1;
    }
    value_at_zero + sign * acc
}

/// Factors over standard Gaussian coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianModel {
    pub n: usize,
    pub factors: Vec<GaussianFactor>,
}

impl GaussianModel {
    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn arity(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.scope.len())
            .max()
            .unwrap_or(0)
            .max(2)
    }

    pub fn multiplicity(&self) -> usize {
        let mut counts = vec![0usize; self.n];
        for f in &self.factors {
            for &j in &f.scope {
                if j < self.n {
                    counts[j] += 1;
                }
            }
        }
        counts.iter().copied().max().unwrap_or(0).max(1)
    }

    /// f(x) over a full n-dimensional point.
    pub fn f_value(&self, x: &[f64]) -> f64 {
        self.factors
            .iter()
            .map(|f| {
                let local: Vec<f64> = f.scope.iter().map(|&j| x[j]).collect();
                f.eval(&local)
            })
            .sum()
    }
}

/// Structural checks plus the catalog Lipschitz certificates.
pub fn validate_gaussian(model: &GaussianModel) -> Result<()> {
    for (i, factor) in model.factors.iter().enumerate() {
        for &j in &factor.scope {
            if j >= model.n {
                return Err(Error::Structural(format!(
                    "factor {i}: scope index {j} out of range (n = {})",
                    model.n
                )));
            }
        }
        let mut sorted = factor.scope.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != factor.scope.len() {
            return Err(Error::Structural(format!("factor {i}: repeated scope index")));
        }
        match &factor.kind {
            GaussianFactorKind::AbsLinear { coeffs, .. } => {
                if coeffs.len() != factor.scope.len() {
                    return Err(Error::Structural(format!(
                        "factor {i}: {} coefficients for scope of size {}",
                        coeffs.len(),
                        factor.scope.len()
                    )));
                }
                let l1: f64 = coeffs.iter().map(|a| a.abs()).sum();
                if l1 > 1.0 + CERT_TOL {
                    return Err(Error::Inadmissible(format!(
                        "factor {i}: abs-linear coefficient l1 norm {l1} > 1"
                    )));
                }
            }
            GaussianFactorKind::EuclideanDistance { block_dim } => {
                if *block_dim == 0 || factor.scope.len() != 2 * block_dim {
                    return Err(Error::Structural(format!(
                        "factor {i}: scope size {} does not match two blocks of dimension {block_dim}",
                        factor.scope.len()
                    )));
                }
            }
            GaussianFactorKind::PiecewiseLinearOfSum { knots, slopes, .. } => {
                if slopes.len() != knots.len() + 1 {
                    return Err(Error::Structural(format!(
                        "factor {i}: {} slopes for {} knots",
                        slopes.len(),
                        knots.len()
                    )));
                }
                if knots.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Structural(format!("factor {i}: knots not increasing")));
                }
                let max_slope = slopes.iter().map(|s| s.abs()).fold(0.0, f64::max);
                if max_slope > 1.0 + CERT_TOL {
                    return Err(Error::Inadmissible(format!(
                        "factor {i}: slope bound {max_slope} > 1"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Radial truncation phi_L: unchanged where |phi| <= L, clamped to modulus L
/// elsewhere. A contraction, so the Lipschitz certificate survives.
pub fn truncate_factor(factor: &GaussianFactor, l: f64) -> Result<GaussianFactor> {
    if l <= 0.0 {
        return Err(Error::Domain(format!("truncation level {l}, need > 0")));
    }
    let mut out = factor.clone();
    out.truncation = Some(match factor.truncation {
        Some(existing) => existing.min(l),
        None => l,
    });
    Ok(out)
}

/// Zero-free radius (1 - delta) / (6 c sqrt(r - 1)).
pub fn gaussian_zero_free_radius(r: usize, c: usize, delta: f64) -> Result<f64> {
    if r < 2 {
        return Err(Error::Domain(format!("r = {r}, need r >= 2")));
    }
    if c < 1 {
        return Err(Error::Domain(format!("c = {c}, need c >= 1")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("delta = {delta}, need 0 <= delta < 1")));
    }
    Ok((1.0 - delta) / (6.0 * c as f64 * ((r - 1) as f64).sqrt()))
}

/// Log-scale bounds: upper = |lambda| m L,
/// lower = -|lambda| m L - pi^2 n / (32 r), for factors bounded by L.
pub fn gaussian_magnitude_bounds(
    model: &GaussianModel,
    l: f64,
    lambda_modulus: f64,
) -> Result<(f64, f64)> {
    let r = model.arity();
    let c = model.multiplicity();
    let radius = gaussian_zero_free_radius(r, c, 0.0)?;
    if lambda_modulus > radius * (1.0 + 1e-12) {
        return Err(Error::LambdaOutOfRange {
            modulus: lambda_modulus,
            radius,
        });
    }
    let m = model.num_factors() as f64;
    let n = model.n as f64;
    let envelope = lambda_modulus * m * l;
    Ok((
        envelope,
        -envelope - std::f64::consts::PI.powi(2) * n / (32.0 * r as f64),
    ))
}

/// A tensor-quadrature expectation with its refinement diagnostic
/// (the difference between the coarse and node-doubled evaluations).
#[derive(Debug, Clone)]
pub struct QuadratureEstimate {
    pub value: Complex64,
    pub refinement_diff: f64,
}

/// Tensor-product quadrature of E[prod over the tuple of phi_i] over the
/// union of the tuple's scopes; coordinates outside the union integrate out.
pub fn gaussian_factor_expectation(
    model: &GaussianModel,
    tuple: &[usize],
    rule: &QuadratureRule,
) -> Result<QuadratureEstimate> {
    for &i in tuple {
        if i >= model.num_factors() {
            return Err(Error::Domain(format!(
                "factor index {i} out of range (m = {})",
                model.num_factors()
            )));
        }
    }
    let fine = QuadratureRule::kink_resilient(2 * rule.len());
    let coarse_value = tensor_expectation(model, tuple, rule)?;
    let fine_value = tensor_expectation(model, tuple, &fine)?;
    Ok(QuadratureEstimate {
        value: Complex64::new(fine_value, 0.0),
        refinement_diff: (fine_value - coarse_value).abs(),
    })
}

fn tensor_expectation(model: &GaussianModel, tuple: &[usize], rule: &QuadratureRule) -> Result<f64> {
    if tuple.is_empty() {
        return Ok(1.0);
    }
    let mut union: Vec<usize> = tuple
        .iter()
        .flat_map(|&i| model.factors[i].scope.iter().copied())
        .collect();
    union.sort_unstable();
    union.dedup();
    let dim = union.len();
    let cost = (rule.len() as f64).powi(dim as i32);
    if cost > DEFAULT_QUAD_COST_CEILING {
        return Err(Error::CostCeiling {
            estimate: cost,
            ceiling: DEFAULT_QUAD_COST_CEILING,
        });
    }
    let position: std::collections::HashMap<usize, usize> =
        union.iter().enumerate().map(|(p, &j)| (j, p)).collect();
    let plans: Vec<Vec<usize>> = tuple
        .iter()
        .map(|&i| model.factors[i].scope.iter().map(|&j| position[&j]).collect())
        .collect();
    let sizes = vec![rule.len(); dim];
    let mut acc = 0.0f64;
    let mut local = Vec::new();
    for_each_assignment(&sizes, |assign| {
        let mut weight = 1.0f64;
        for &a in assign {
            weight *= rule.weights[a];
        }
        let mut prod = weight;
        for (&i, positions) in tuple.iter().zip(&plans) {
            local.clear();
            local.extend(positions.iter().map(|&p| rule.nodes[assign[p]]));
            prod *= model.factors[i].eval(&local);
        }
        acc += prod;
    });
    Ok(acc)
}

/// Default truncation level: 1.05 times the largest |phi| seen on the
/// factor's own quadrature grid, so the clamp is inactive on the nodes.
pub fn default_truncation_level(model: &GaussianModel, rule: &QuadratureRule) -> f64 {
    let mut max_abs = 0.0f64;
    for factor in &model.factors {
        let sizes = vec![rule.len(); factor.scope.len()];
        let mut local = Vec::new();
        for_each_assignment(&sizes, |assign| {
            local.clear();
            local.extend(assign.iter().map(|&a| rule.nodes[a]));
            max_abs = max_abs.max(factor.raw(&local).abs());
        });
    }
    if max_abs == 0.0 {
        1.0
    } else {
        1.05 * max_abs
    }
}

/// Truncate every factor at L and shift by its truncated value at the
/// origin; returns the prepared model and gamma = f_L(0).
pub fn truncate_and_shift(model: &GaussianModel, l: f64) -> Result<(GaussianModel, f64)> {
    let mut gamma = 0.0f64;
    let mut factors = Vec::with_capacity(model.factors.len());
    for factor in &model.factors {
        let mut truncated = truncate_factor(factor, l)?;
        let origin = vec![0.0; factor.scope.len()];
        let at_zero = {
            let v = truncated.raw(&origin);
            v.clamp(-l, l)
        };
        truncated.offset = at_zero;
        gamma += at_zero;
        factors.push(truncated);
    }
    Ok((
        GaussianModel {
            n: model.n,
            factors,
        },
        gamma,
    ))
}

/// Split a multiset of factor indices into groups whose scopes share
/// coordinates; disjoint groups are independent under the product measure.
fn connected_groups(model: &GaussianModel, multiset: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let k = multiset.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for a in 0..k {
        for b in (a + 1)..k {
            let sa = &model.factors[multiset[a].0].scope;
            let sb = &model.factors[multiset[b].0].scope;
            if sa.iter().any(|j| sb.contains(j)) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: std::collections::HashMap<usize, Vec<(usize, usize)>> =
        std::collections::HashMap::new();
    for i in 0..k {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(multiset[i]);
    }
    groups.into_values().collect()
}

fn pipeline_log_value(
    model: &GaussianModel,
    plan: &ApproxPlan,
    gamma: f64,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    let order = plan.truncation_degree.min(plan.interpolation_degree);
    let mut cache: std::collections::HashMap<Vec<(usize, usize)>, Complex64> =
        std::collections::HashMap::new();
    let values = multiset_power_moments(model.num_factors(), order, &mut |multiset| {
        // factor the expectation over scope-connected groups; each group
        // integrates over only its own coordinate union
        let mut product = Complex64::new(1.0, 0.0);
        for mut group in connected_groups(model, multiset) {
            group.sort_unstable();
            let value = match cache.get(&group) {
                Some(&v) => v,
                None => {
                    let tuple: Vec<usize> = group
                        .iter()
                        .flat_map(|&(i, c)| std::iter::repeat(i).take(c))
                        .collect();
                    let v = Complex64::new(tensor_expectation(model, &tuple, rule)?, 0.0);
                    cache.insert(group, v);
                    v
                }
            };
            product *= value;
        }
        Ok(product)
    })?;
    let moments = MomentSequence { values };
    let series = taylor_polynomial(&moments, plan.lambda, order);
    let log_series = log_taylor(&series, plan.interpolation_degree)?;
    let t_at_one = evaluate_interpolant(&log_series, Complex64::new(1.0, 0.0));
    Ok(t_at_one + plan.lambda * gamma)
}

/// Interpolation approximation of E e^{lambda f} under the standard
/// Gaussian measure. The epsilon guarantee assumes exact moments; the gap
/// introduced by quadrature is measured by rerunning the whole pipeline at
/// doubled node count and reported as `quadrature_residual`.
pub fn approximate_gaussian_partition(
    model: &GaussianModel,
    lambda: Complex64,
    epsilon: f64,
    delta: f64,
    truncation_l: Option<f64>,
    rule: &QuadratureRule,
) -> Result<ApproxReport> {
    let start = std::time::Instant::now();
    validate_gaussian(model)?;
    let r = model.arity();
    let c = model.multiplicity();
    let radius = gaussian_zero_free_radius(r, c, delta)?;
    let modulus = lambda.norm();
    if modulus > radius * (1.0 + 1e-12) {
        return Err(Error::LambdaOutOfRange { modulus, radius });
    }
    let l = truncation_l.unwrap_or_else(|| default_truncation_level(model, rule));
    let (prepared, gamma) = truncate_and_shift(model, l)?;
    let max_offset = prepared
        .factors
        .iter()
        .map(|f| f.offset.abs())
        .fold(0.0, f64::max);
    let factor_bound = if prepared.factors.is_empty() {
        0.0
    } else {
        l + max_offset
    };
    let beta = 1.0 / (1.0 - delta);
    let (_, log_lower_beta) = gaussian_magnitude_bounds(&prepared, factor_bound, modulus * beta)?;
    let plan = plan_from_bounds(
        lambda,
        epsilon,
        delta,
        prepared.num_factors(),
        factor_bound,
        log_lower_beta,
        radius,
    )?;
    let log_value = pipeline_log_value(&prepared, &plan, gamma, rule)?;
    let refined_rule = QuadratureRule::kink_resilient(2 * rule.len());
    let log_value_refined = pipeline_log_value(&prepared, &plan, gamma, &refined_rule)?;
    let quadrature_residual = (log_value_refined - log_value).norm();
    Ok(ApproxReport {
        value: log_value_refined.exp(),
        log_value: log_value_refined,
        epsilon_guarantee: epsilon,
        plan,
        shift: ShiftRecord {
            anchor: Vec::new(),
            gamma: Complex64::new(gamma, 0.0),
        },
        quadrature_residual: Some(quadrature_residual),
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Dense-quadrature oracle for E e^{lambda f}, n <= 3. Doubles the per-axis
/// node count until two successive evaluations agree to 1e-9 relative.
pub fn exact_gaussian_partition(
    model: &GaussianModel,
    lambda: Complex64,
    axis_nodes: usize,
) -> Result<Complex64> {
    validate_gaussian(model)?;
    if model.n > 3 {
        return Err(Error::Domain(format!(
            "dense oracle limited to n <= 3, got n = {}",
            model.n
        )));
    }
    let mut nodes = axis_nodes.max(16);
    let mut previous: Option<Complex64> = None;
    loop {
        let rule = QuadratureRule::adapted_to(model, nodes);
        let value = dense_eval(model, lambda, &rule);
        if let Some(prev) = previous {
            if (value - prev).norm() < 1e-9 * value.norm().max(1e-300) {
                return Ok(value);
            }
            if nodes > 2048 {
                return Err(Error::NotConverged {
                    previous: prev,
                    current: value,
                });
            }
        }
        previous = Some(value);
        nodes *= 2;
    }
}

fn dense_eval(model: &GaussianModel, lambda: Complex64, rule: &QuadratureRule) -> Complex64 {
    let sizes = vec![rule.len(); model.n];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut x = vec![0.0f64; model.n];
    for_each_assignment(&sizes, |assign| {
        let mut weight = 1.0f64;
        for (j, &a) in assign.iter().enumerate() {
            weight *= rule.weights[a];
            x[j] = rule.nodes[a];
        }
        acc += (lambda * model.f_value(&x)).exp() * weight;
    });
    acc
}

/// Freeze the dense quadrature grid of a model into a reusable evaluator
/// for z -> E e^{z f}, for zero scans over the lambda plane.
pub fn gaussian_grid_evaluator(model: &GaussianModel, rule: &QuadratureRule) -> PartitionEvaluator {
    let sizes = vec![rule.len(); model.n];
    let mut terms = Vec::new();
    let mut x = vec![0.0f64; model.n];
    for_each_assignment(&sizes, |assign| {
        let mut log_weight = 0.0f64;
        for (j, &a) in assign.iter().enumerate() {
            log_weight += rule.weights[a].ln();
            x[j] = rule.nodes[a];
        }
        terms.push((log_weight, Complex64::new(model.f_value(&x), 0.0)));
    });
    PartitionEvaluator::from_terms(terms)
}
