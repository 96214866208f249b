//! Model constructors: Ising graphs, tilted perfect-matching sums over
//! hypergraphs, Gaussian particle repulsion, the |..|x|-1|..| integrand
//! family, factor cloning, and the optimality experiment showing the
//! 1/sqrt(n) decay of the nearest zero is the true rate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{scan_zeros_fn, ZeroScanReport};
use crate::gaussian::{GaussianFactor, GaussianFactorKind, GaussianModel};
use crate::spinmodel::{zero_free_radius, Factor, Space, SpinSystem};

/// Vertex-index sets over a fixed vertex count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    pub num_vertices: usize,
    pub edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn validate(&self) -> Result<()> {
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.is_empty() {
                return Err(Error::Structural(format!("edge {e} is empty")));
            }
            let mut sorted = edge.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != edge.len() {
                return Err(Error::Structural(format!("edge {e} repeats a vertex")));
            }
            for &v in edge {
                if v >= self.num_vertices {
                    return Err(Error::Structural(format!(
                        "edge {e}: vertex {v} out of range (|V| = {})",
                        self.num_vertices
                    )));
                }
            }
        }
        Ok(())
    }

    /// Incident edge indices per vertex.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_vertices];
        for (e, edge) in self.edges.iter().enumerate() {
            for &v in edge {
                inc[v].push(e);
            }
        }
        inc
    }
}

/// Pairwise-interaction system on {-1, 1} spins: one factor w x_u x_v / 2
/// per edge and h x_v / 2 per nonzero field entry. State 0 encodes spin -1.
pub fn build_ising(
    num_vertices: usize,
    edges: &[(usize, usize, f64)],
    field: &[f64],
) -> Result<SpinSystem> {
    if !field.is_empty() && field.len() != num_vertices {
        return Err(Error::Structural(format!(
            "field has {} entries for {num_vertices} vertices",
            field.len()
        )));
    }
    let spin = |state: usize| if state == 0 { -1.0 } else { 1.0 };
    let mut factors = Vec::new();
    for &(u, v, w) in edges {
        if u >= num_vertices || v >= num_vertices || u == v {
            return Err(Error::Structural(format!("bad edge ({u}, {v})")));
        }
        if w.abs() > 1.0 {
            return Err(Error::Inadmissible(format!(
                "edge ({u}, {v}) weight {w} exceeds the unit coupling budget"
            )));
        }
        // row-major over (s_u, s_v), last index fastest
        let table: Vec<Complex64> = (0..4)
            .map(|i| Complex64::new(w * spin(i / 2) * spin(i % 2) / 2.0, 0.0))
            .collect();
        factors.push(Factor {
            scope: vec![u, v],
            table,
        });
    }
    for (v, &h) in field.iter().enumerate() {
        if h == 0.0 {
            continue;
        }
        if h.abs() > 1.0 {
            return Err(Error::Inadmissible(format!(
                "field at vertex {v} is {h}, exceeds the unit budget"
            )));
        }
        factors.push(Factor {
            scope: vec![v],
            table: vec![
                Complex64::new(-h / 2.0, 0.0),
                Complex64::new(h / 2.0, 0.0),
            ],
        });
    }
    Ok(SpinSystem::new(
        (0..num_vertices).map(|_| Space::uniform(2)).collect(),
        factors,
    ))
}

/// A tilted perfect-matching sum: spaces index edge subsets, factors damp
/// vertices whose selected-incidence count differs from 1.
#[derive(Debug, Clone)]
pub struct MatchingTilt {
    pub system: SpinSystem,
    pub lambda: f64,
    /// mu against the zero-free radius of the constructed system; when
    /// false the approximation guarantee does not apply but the exact
    /// oracle still does.
    pub lambda_admissible: bool,
    pub radius: f64,
}

/// Build the edge-subset system whose partition value E e^{mu f} is the
/// perfect-matching sum tilted by e^{-mu sum_v |k_v - 1|}. One binary space
/// per edge with selection probability p_e; one factor per vertex v with
/// value -|k_v - 1| over its incident edges.
pub fn build_matching_tilt(h: &Hypergraph, mu: f64, edge_prob: &[f64]) -> Result<MatchingTilt> {
    h.validate()?;
    if mu <= 0.0 {
        return Err(Error::Domain(format!("mu = {mu}, need mu > 0")));
    }
    if edge_prob.len() != h.edges.len() {
        return Err(Error::Structural(format!(
            "{} probabilities for {} edges",
            edge_prob.len(),
            h.edges.len()
        )));
    }
    for (e, &p) in edge_prob.iter().enumerate() {
        if !(0.0..1.0).contains(&p) || p == 0.0 {
            return Err(Error::Domain(format!(
                "edge {e} probability {p} outside (0, 1)"
            )));
        }
    }
    let spaces: Vec<Space> = edge_prob.iter().map(|&p| Space::binary(p)).collect();
    let incidence = h.incidence();
    let mut factors = Vec::with_capacity(h.num_vertices);
    for inc in &incidence {
        let deg = inc.len();
        let table: Vec<Complex64> = (0..(1usize << deg))
            .map(|mask| {
                // row-major, last scope position fastest: bit weight of
                // position j is 2^(deg - 1 - j), but |k - 1| only needs the
                // popcount of selected incident edges
                let k = (mask as u32).count_ones() as f64;
                Complex64::new(-(k - 1.0).abs(), 0.0)
            })
            .collect();
        factors.push(Factor {
            scope: inc.clone(),
            table,
        });
    }
    let max_degree = incidence.iter().map(Vec::len).max().unwrap_or(0);
    let max_cardinality = h.edges.iter().map(Vec::len).max().unwrap_or(0);
    let radius = zero_free_radius(max_degree.max(2), max_cardinality.max(1), 0.0)?;
    Ok(MatchingTilt {
        system: SpinSystem::new(spaces, factors),
        lambda: mu,
        lambda_admissible: mu <= radius * (1.0 + 1e-12),
        radius,
    })
}

/// N particles in d dimensions with pairwise Euclidean-distance factors:
/// n = d N coordinates, m = N(N-1)/2 factors, scope size 2d.
pub fn build_particles(num_particles: usize, dim: usize) -> Result<GaussianModel> {
    if num_particles < 2 || dim < 1 {
        return Err(Error::Domain(format!(
            "need N >= 2 and d >= 1, got N = {num_particles}, d = {dim}"
        )));
    }
    let block = |i: usize| (i * dim..(i + 1) * dim).collect::<Vec<_>>();
    let mut factors = Vec::new();
    for i in 0..num_particles {
        for j in (i + 1)..num_particles {
            let mut scope = block(i);
            scope.extend(block(j));
            factors.push(GaussianFactor::new(
                GaussianFactorKind::EuclideanDistance { block_dim: dim },
                scope,
            ));
        }
    }
    Ok(GaussianModel {
        n: num_particles * dim,
        factors,
    })
}

/// n independent factors ||x_i| - 1|, a bounded integrand whose logarithm
/// is neither convex nor concave.
pub fn build_abs_integrand(n: usize) -> Result<GaussianModel> {
    if n == 0 {
        return Err(Error::Domain("need n >= 1".into()));
    }
    let factors = (0..n)
        .map(|i| {
            GaussianFactor::new(
                GaussianFactorKind::PiecewiseLinearOfSum {
                    knots: vec![-1.0, 0.0, 1.0],
                    slopes: vec![-1.0, 1.0, -1.0, 1.0],
                    value_at_zero: 1.0,
                },
                vec![i],
            )
        })
        .collect();
    Ok(GaussianModel { n, factors })
}

/// Parameters of the half-line tilt psi(x) = v x on x >= 0, u x on x < 0,
/// whose Gaussian integral of e^psi vanishes; tau = max(|u|, |v|).
#[derive(Debug, Clone)]
pub struct OptimalityConfig {
    pub u: Complex64,
    pub v: Complex64,
    pub tau: f64,
    /// modulus level of the clamp psi_L
    pub l_trunc: f64,
    /// z-plane radius inside which the truncated integral has a zero
    pub rho: f64,
    /// objective modulus at (u, v), measured at doubled quadrature resolution
    pub residual: f64,
}

impl OptimalityConfig {
    /// psi_L(x): the tilt clamped to modulus l_trunc.
    pub fn psi_l(&self, x: f64) -> Complex64 {
        let raw = if x >= 0.0 { self.v * x } else { self.u * x };
        let modulus = raw.norm();
        if self.l_trunc > 0.0 && modulus > self.l_trunc {
            raw * (self.l_trunc / modulus)
        } else {
            raw
        }
    }
}

/// Integration half-width for the tilt objective; the integrand decays as
/// e^{tau |x| - x^2/2} so [0, 12] covers any tau of interest here.
const PSI_INTEGRAL_BOUND: f64 = 12.0;

/// Composite-Simpson value of int_0^B g(x) e^{-x^2/2} dx / sqrt(2 pi).
fn half_line_integral(
    g: &dyn Fn(f64) -> Complex64,
    intervals: usize,
) -> Complex64 {
    let n = intervals + intervals % 2;
    let h = PSI_INTEGRAL_BOUND / n as f64;
    let density = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=n {
        let x = i as f64 * h;
        let coeff = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += g(x) * (coeff * density(x));
    }
    acc * (h / 3.0)
}

/// Objective G(v) = P(x < 0) + int_0^inf e^{v x} dGaussian, which vanishes
/// exactly when the u = 0 tilt integrates e^psi to zero.
fn psi_objective(v: Complex64, intervals: usize) -> Complex64 {
    Complex64::new(0.5, 0.0) + half_line_integral(&|x| (v * x).exp(), intervals)
}

fn psi_objective_derivative(v: Complex64, intervals: usize) -> Complex64 {
    half_line_integral(&|x| (v * x).exp() * x, intervals)
}

/// Solve G(v) = 0 for complex v with u fixed at 0: coarse modulus scan over
/// the square [-grid_bound, grid_bound]^2, then damped Newton. The reported
/// residual is |G(v)| recomputed at doubled quadrature resolution.
pub fn solve_psi_equation(grid_bound: f64, newton_tol: f64) -> Result<OptimalityConfig> {
    if grid_bound <= 0.0 || newton_tol <= 0.0 {
        return Err(Error::Domain(
            "grid bound and tolerance must be positive".into(),
        ));
    }
    let intervals = 2400usize;
    let steps = 48;
    let mut best = Complex64::new(0.0, 0.0);
    let mut best_mod = f64::INFINITY;
    for i in 0..=steps {
        for j in 0..=steps {
            let v = Complex64::new(
                -grid_bound + 2.0 * grid_bound * i as f64 / steps as f64,
                -grid_bound + 2.0 * grid_bound * j as f64 / steps as f64,
            );
            let modulus = psi_objective(v, intervals).norm();
            if modulus < best_mod {
                best_mod = modulus;
                best = v;
            }
        }
    }
    // the objective at v = 0 is 1 (it never vanishes near the origin); a
    // grid minimum not clearly below that means the root is outside
    if best_mod > 0.5 {
        return Err(Error::RootSearch(format!(
            "no root candidate inside |Re v|, |Im v| <= {grid_bound} \
             (best objective modulus {best_mod}); raise the grid bound"
        )));
    }
    let mut v = best;
    let mut value = psi_objective(v, intervals);
    for _ in 0..200 {
        if value.norm() <= newton_tol {
            break;
        }
        let derivative = psi_objective_derivative(v, intervals);
        if derivative.norm() == 0.0 {
            return Err(Error::RootSearch("tilt objective derivative vanished".into()));
        }
        let mut step = value / derivative;
        let mut accepted = false;
        for _ in 0..40 {
            let candidate = v - step;
            let candidate_value = psi_objective(candidate, intervals);
            if candidate_value.norm() < value.norm() {
                v = candidate;
                value = candidate_value;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::RootSearch(format!(
                "Newton stalled at |G| = {}",
                value.norm()
            )));
        }
    }
    let residual = psi_objective(v, 2 * intervals).norm();
    if residual > newton_tol {
        return Err(Error::RootSearch(format!(
            "residual {residual} above tolerance {newton_tol}"
        )));
    }
    Ok(OptimalityConfig {
        u: Complex64::new(0.0, 0.0),
        v,
        tau: v.norm(),
        l_trunc: 0.0,
        rho: 1.25,
        residual,
    })
}

/// Probe the objective modulus at a given v (diagnostic; at v = 0 it
/// equals 1 under the normalized measure).
pub fn psi_objective_probe(v: Complex64) -> f64 {
    psi_objective(v, 4800).norm()
}

/// The L-truncated tilt integral F_L(z) = E e^{z psi_L(x)} over a standard
/// Gaussian coordinate, and its z-derivative.
fn truncated_tilt_integral(config: &OptimalityConfig, z: Complex64) -> Complex64 {
    Complex64::new(0.5, 0.0)
        + half_line_integral(&|x| (z * config.psi_l(x)).exp(), 2400)
}

fn truncated_tilt_derivative(config: &OptimalityConfig, z: Complex64) -> Complex64 {
    half_line_integral(&|x| (z * config.psi_l(x)).exp() * config.psi_l(x), 2400)
}

/// Raise the clamp level L geometrically until z -> E e^{z psi_L} has a
/// zero inside |z| < rho, expanding rho by 1.5 when no L in range works.
/// The untruncated integral vanishes at z = 1, so for large L a zero sits
/// nearby; this finds how large is large enough.
pub fn calibrate_truncation(config: &OptimalityConfig) -> Result<OptimalityConfig> {
    let mut rho = config.rho.max(1.25);
    for _ in 0..4 {
        let mut l = config.tau.max(1.0);
        for _ in 0..12 {
            let probe = OptimalityConfig {
                l_trunc: l,
                rho,
                ..config.clone()
            };
            let report = scan_zeros_fn(
                &|z| truncated_tilt_integral(&probe, z),
                &|z| truncated_tilt_derivative(&probe, z),
                rho,
                32,
            )?;
            if report.min_modulus_zero.is_some() {
                return Ok(probe);
            }
            l *= 2.0;
        }
        rho *= 1.5;
    }
    Err(Error::RootSearch(
        "no zero of the truncated tilt integral found; tilt solve suspect".into(),
    ))
}

/// E e^{z phi} on the uniform Boolean cube for the lifted factor
/// phi(x) = (sqrt(n) / 2 tau) psi_L(sum x_i / sqrt(n)), evaluated in O(n)
/// terms since phi depends only on the coordinate sum. Binomial weights
/// stay in log scale and the sum is exponent-shifted, so any n is safe.
pub fn cube_partition_eval(config: &OptimalityConfig, n: usize, z: Complex64) -> Result<Complex64> {
    cube_eval_inner(config, n, z, false)
}

/// d/dz of `cube_partition_eval`, for Newton polishing in the zero scan.
pub fn cube_partition_derivative(
    config: &OptimalityConfig,
    n: usize,
    z: Complex64,
) -> Result<Complex64> {
    cube_eval_inner(config, n, z, true)
}

fn cube_eval_inner(
    config: &OptimalityConfig,
    n: usize,
    z: Complex64,
    derivative: bool,
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain("need n >= 1".into()));
    }
    if config.tau <= 0.0 || config.l_trunc <= 0.0 {
        return Err(Error::Domain(
            "config needs tau > 0 and a calibrated truncation level".into(),
        ));
    }
    let scale = (n as f64).sqrt() / (2.0 * config.tau);
    let ln2 = std::f64::consts::LN_2;
    // exponents t_k = ln C(n,k) - n ln 2 + z phi_k, summed as
    // e^M sum e^{t_k - M} with M = max Re t_k
    let mut log_binom = 0.0f64;
    let mut exponents = Vec::with_capacity(n + 1);
    let mut phis = Vec::with_capacity(n + 1);
    let mut max_re = f64::NEG_INFINITY;
    for k in 0..=n {
        let s = (2.0 * k as f64 - n as f64) / (n as f64).sqrt();
        let phi = config.psi_l(s) * scale;
        let t = z * phi + (log_binom - n as f64 * ln2);
        max_re = max_re.max(t.re);
        exponents.push(t);
        phis.push(phi);
        if k < n {
            log_binom += ((n - k) as f64 / (k + 1) as f64).ln();
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, phi) in exponents.iter().zip(&phis) {
        let term = (t - max_re).exp();
        acc += if derivative { term * phi } else { term };
    }
    Ok(acc * Complex64::new(max_re, 0.0).exp())
}

/// One row of the optimality experiment: nearest zero of the cube
/// partition value against the 2 tau rho / sqrt(n) envelope.
#[derive(Debug, Clone)]
pub struct OptimalityRow {
    pub n: usize,
    pub min_zero_modulus: Option<f64>,
    pub envelope: f64,
}

/// For each n, scan z -> E e^{z phi} for its minimum-modulus zero inside
/// 1.5x the theoretical envelope 2 tau rho / sqrt(n). An absent zero is
/// reported, not an error: small n may have none.
pub fn optimality_experiment(
    config: &OptimalityConfig,
    ns: &[usize],
    grid: usize,
) -> Result<Vec<OptimalityRow>> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let envelope = 2.0 * config.tau * config.rho / (n as f64).sqrt();
        let report: ZeroScanReport = scan_zeros_fn(
            &|z| cube_partition_eval(config, n, z).unwrap(),
            &|z| cube_partition_derivative(config, n, z).unwrap(),
            1.5 * envelope,
            grid,
        )?;
        rows.push(OptimalityRow {
            n,
            min_zero_modulus: report.min_modulus_zero.map(|z| z.norm()),
            envelope,
        });
    }
    Ok(rows)
}

/// Repeat every factor k times; E e^{lambda f_k} = E e^{(k lambda) f} and
/// the multiplicity scales to k c.
pub fn clone_factor_system(system: &SpinSystem, k: usize) -> Result<SpinSystem> {
    if k < 1 {
        return Err(Error::Domain("need k >= 1".into()));
    }
    let mut factors = Vec::with_capacity(system.factors.len() * k);
    for _ in 0..k {
        factors.extend(system.factors.iter().cloned());
    }
    Ok(SpinSystem::new(system.spaces.clone(), factors))
}
