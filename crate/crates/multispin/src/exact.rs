//! Brute-force oracle for E e^{lambda f} and a complex-zero scanner for
//! z -> E e^{z f}, with winding-number evidence from the argument principle.
//!
//! The scanner is generic over an entire function and its derivative, so
//! the same grid + damped-Newton machinery serves both explicit systems and
//! the O(n) symmetric-sum evaluator used by the optimality experiments.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spinmodel::{for_each_assignment, SpinSystem};

/// Default cap on full-enumeration size, in configurations.
pub const DEFAULT_ENUMERATION_CEILING: f64 = (1u64 << 24) as f64;

/// Residual threshold for a reported zero, relative to the grid max of |F|.
pub const ZERO_RESIDUAL_REL: f64 = 1e-8;

/// Deduplication radius for converged Newton roots.
pub const DEDUP_RADIUS: f64 = 1e-6;

/// Precompiled term list for F(z) = sum_x exp(log w_x + z f(x)).
///
/// Per-configuration weights are accumulated in log scale and exponentiated
/// once per evaluation, so skewed probabilities do not underflow term-wise.
pub struct PartitionEvaluator {
    terms: Vec<(f64, Complex64)>,
}

impl PartitionEvaluator {
    pub fn compile(system: &SpinSystem) -> Result<Self> {
        Self::compile_with_ceiling(system, DEFAULT_ENUMERATION_CEILING)
    }

    pub fn compile_with_ceiling(system: &SpinSystem, ceiling: f64) -> Result<Self> {
        let count = system.configuration_count();
        if count > ceiling {
            return Err(Error::CostCeiling {
                estimate: count,
                ceiling,
            });
        }
        let sizes: Vec<usize> = system.spaces.iter().map(|s| s.size).collect();
        let mut terms = Vec::with_capacity(count as usize);
        for_each_assignment(&sizes, |config| {
            terms.push((system.log_weight(config), system.f_value(config)));
        });
        Ok(PartitionEvaluator { terms })
    }

    /// Build directly from (log weight, factor sum) terms, for evaluators
    /// whose weights come from quadrature grids rather than spin systems.
    pub fn from_terms(terms: Vec<(f64, Complex64)>) -> Self {
        PartitionEvaluator { terms }
    }

    /// F(z) = E e^{z f}.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(logw, f) in &self.terms {
            acc += (z * f + logw).exp();
        }
        acc
    }

    /// F'(z) = E (f e^{z f}), computed analytically term by term.
    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(logw, f) in &self.terms {
            acc += f * (z * f + logw).exp();
        }
        acc
    }
}

/// Exact partition value by full enumeration.
pub fn exact_partition(system: &SpinSystem, lambda: Complex64) -> Result<Complex64> {
    Ok(PartitionEvaluator::compile(system)?.eval(lambda))
}

pub fn exact_partition_with_ceiling(
    system: &SpinSystem,
    lambda: Complex64,
    ceiling: f64,
) -> Result<Complex64> {
    Ok(PartitionEvaluator::compile_with_ceiling(system, ceiling)?.eval(lambda))
}

/// A located zero with its residual |F(z)|.
#[derive(Debug, Clone)]
pub struct ZeroLocation {
    pub z: Complex64,
    pub residual: f64,
}

/// Winding number of F along one circle.
#[derive(Debug, Clone)]
pub struct WindingCircle {
    pub circle_radius: f64,
    pub winding: i64,
}

#[derive(Debug, Clone)]
pub struct ZeroScanReport {
    pub zeros: Vec<ZeroLocation>,
    pub disc_radius: f64,
    pub winding_evidence: Vec<WindingCircle>,
    pub min_modulus_zero: Option<Complex64>,
    pub grid_max: f64,
    pub unconverged_seeds: usize,
}

/// Discrete argument-principle count of zeros of an entire function inside
/// a sampled circle. Fails when a sample sits on a zero or an argument step
/// is too coarse to resolve.
pub fn winding_number_fn(
    f: &dyn Fn(Complex64) -> Complex64,
    center: Complex64,
    radius: f64,
    samples: usize,
) -> Result<i64> {
    if samples < 64 {
        return Err(Error::Domain(format!("samples = {samples}, need >= 64")));
    }
    let values: Vec<Complex64> = (0..samples)
        .map(|j| {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
            f(center + Complex64::from_polar(radius, angle))
        })
        .collect();
    let max_mod = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut total = 0.0f64;
    for j in 0..samples {
        let a = values[j];
        let b = values[(j + 1) % samples];
        if a.norm() <= 1e-13 * max_mod {
            return Err(Error::WindingNearZero {
                z: center + Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / samples as f64),
                modulus: a.norm(),
            });
        }
        let step = (b / a).arg();
        if step.abs() >= std::f64::consts::PI * (1.0 - 1e-9) {
            return Err(Error::WindingUnresolved { step });
        }
        total += step;
    }
    let winding = total / (2.0 * std::f64::consts::PI);
    Ok(winding.round() as i64)
}

/// Winding number of z -> E e^{z f} for an explicit system.
pub fn winding_number(
    system: &SpinSystem,
    center: Complex64,
    radius: f64,
    samples: usize,
) -> Result<i64> {
    let evaluator = PartitionEvaluator::compile(system)?;
    winding_number_fn(&|z| evaluator.eval(z), center, radius, samples)
}

/// Damped Newton polish of one seed. Returns the refined point, or None if
/// the iteration stalls without reducing |F| to the residual target.
fn newton_polish(
    f: &dyn Fn(Complex64) -> Complex64,
    df: &dyn Fn(Complex64) -> Complex64,
    seed: Complex64,
    residual_target: f64,
) -> Option<Complex64> {
    let mut z = seed;
    let mut fz = f(z);
    for _ in 0..60 {
        if fz.norm() <= residual_target {
            return Some(z);
        }
        let d = df(z);
        if d.norm() == 0.0 {
            return None;
        }
        let full_step = fz / d;
        let mut scale = 1.0f64;
        let mut advanced = false;
        for _ in 0..24 {
            let candidate = z - full_step * scale;
            let fc = f(candidate);
            if fc.norm() < fz.norm() {
                z = candidate;
                fz = fc;
                advanced = true;
                break;
            }
            scale *= 0.5;
        }
        if !advanced {
            return None;
        }
        if (full_step * scale).norm() < 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    if fz.norm() <= residual_target {
        Some(z)
    } else {
        None
    }
}

/// Grid scan of a disc for zeros of an entire function, with damped-Newton
/// polishing from local minima of |F| and winding evidence on three
/// concentric circles.
pub fn scan_zeros_fn(
    f: &dyn Fn(Complex64) -> Complex64,
    df: &dyn Fn(Complex64) -> Complex64,
    disc_radius: f64,
    grid: usize,
) -> Result<ZeroScanReport> {
    if grid < 4 {
        return Err(Error::Domain(format!("grid = {grid}, need >= 4")));
    }
    if disc_radius <= 0.0 {
        return Err(Error::Domain("disc_radius must be positive".into()));
    }
    let step = 2.0 * disc_radius / (grid - 1) as f64;
    let coord = |i: usize| -> f64 { -disc_radius + step * i as f64 };
    // |F| over the lattice; points outside the disc are marked unusable.
    let mut modulus = vec![f64::INFINITY; grid * grid];
    let mut grid_max = 0.0f64;
    for iy in 0..grid {
        for ix in 0..grid {
            let z = Complex64::new(coord(ix), coord(iy));
            if z.norm() <= disc_radius * (1.0 + 1e-12) {
                let v = f(z).norm();
                modulus[iy * grid + ix] = v;
                grid_max = grid_max.max(v);
            }
        }
    }
    if grid_max == 0.0 {
        return Err(Error::RootSearch("|F| vanishes on the whole grid".into()));
    }
    let residual_target = ZERO_RESIDUAL_REL * grid_max;

    // Newton from every local minimum of |F| on the lattice.
    let mut zeros: Vec<ZeroLocation> = Vec::new();
    let mut unconverged = 0usize;
    for iy in 0..grid {
        for ix in 0..grid {
            let here = modulus[iy * grid + ix];
            if !here.is_finite() {
                continue;
            }
            let mut is_min = true;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                    if jx < 0 || jy < 0 || jx >= grid as i64 || jy >= grid as i64 {
                        continue;
                    }
                    let other = modulus[jy as usize * grid + jx as usize];
                    if other.is_finite() && other < here {
                        is_min = false;
                    }
                }
            }
            if !is_min {
                continue;
            }
            // Only chase minima that plausibly sit near a zero.
            if here > 0.5 * grid_max {
                continue;
            }
            let seed = Complex64::new(coord(ix), coord(iy));
            match newton_polish(f, df, seed, residual_target) {
                Some(z) if z.norm() <= disc_radius * (1.0 + 1e-9) => {
                    if !zeros.iter().any(|known| (known.z - z).norm() < DEDUP_RADIUS) {
                        zeros.push(ZeroLocation {
                            z,
                            residual: f(z).norm(),
                        });
                    }
                }
                Some(_) => {} // converged outside the disc
                None => unconverged += 1,
            }
        }
    }
    zeros.sort_by(|a, b| a.z.norm().partial_cmp(&b.z.norm()).unwrap());

    // Winding evidence on three concentric circles; nudge a radius that
    // happens to pass through a zero.
    let mut winding_evidence = Vec::new();
    for fraction in [1.0 / 3.0, 2.0 / 3.0, 1.0] {
        let mut radius = disc_radius * fraction;
        let mut outcome = None;
        for _ in 0..8 {
            match winding_number_fn(f, Complex64::new(0.0, 0.0), radius, 512) {
                Ok(w) => {
                    outcome = Some(WindingCircle {
                        circle_radius: radius,
                        winding: w,
                    });
                    break;
                }
                Err(Error::WindingNearZero { .. }) | Err(Error::WindingUnresolved { .. }) => {
                    radius *= 1.0 + 1e-3;
                }
                Err(e) => return Err(e),
            }
        }
        if let Some(circle) = outcome {
            winding_evidence.push(circle);
        }
    }

    let min_modulus_zero = zeros.first().map(|loc| loc.z);
    Ok(ZeroScanReport {
        zeros,
        disc_radius,
        winding_evidence,
        min_modulus_zero,
        grid_max,
        unconverged_seeds: unconverged,
    })
}

/// Scan z -> E e^{z f} of an explicit system for zeros in a disc.
pub fn scan_zeros(system: &SpinSystem, disc_radius: f64, grid: usize) -> Result<ZeroScanReport> {
    let evaluator = PartitionEvaluator::compile(system)?;
    scan_zeros_fn(
        &|z| evaluator.eval(z),
        &|z| evaluator.eval_derivative(z),
        disc_radius,
        grid,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinmodel::{Factor, Space, SpinSystem};

    fn half_product_system() -> SpinSystem {
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
    fn exact_normalization() {
        let system = half_product_system();
        let v = exact_partition(&system, Complex64::new(0.0, 0.0)).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);

        let empty = SpinSystem::new(vec![Space::uniform(3); 2], vec![]);
        let v = exact_partition(&empty, Complex64::new(0.7, -0.3)).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn exact_cosh_closed_form() {
        // E e^{lambda x1 x2 / 2} = cosh(lambda / 2)
        let system = half_product_system();
        let v = exact_partition(&system, Complex64::new(0.2, 0.0)).unwrap();
        assert!((v.re - 0.1f64.cosh()).abs() < 1e-14);
        assert!(v.im.abs() < 1e-15);
        assert!((v.re - 1.00500417).abs() < 1e-8);
    }

    #[test]
    fn enumeration_ceiling() {
        let system = SpinSystem::new(vec![Space::uniform(2); 30], vec![]);
        match exact_partition(&system, Complex64::new(0.0, 0.0)) {
            Err(Error::CostCeiling { .. }) => {}
            other => panic!("expected ceiling error, got {other:?}"),
        }
    }

    #[test]
    fn winding_of_constant_is_zero() {
        let empty = SpinSystem::new(vec![Space::uniform(2); 2], vec![]);
        let w = winding_number(&empty, Complex64::new(0.3, -0.2), 2.0, 64).unwrap();
        assert_eq!(w, 0);
    }

    #[test]
    fn winding_counts_cosh_zero() {
        // F(z) = cosh(z/2) has a simple zero at z = i pi.
        let system = half_product_system();
        let center = Complex64::new(0.0, std::f64::consts::PI);
        assert_eq!(winding_number(&system, center, 0.5, 256).unwrap(), 1);
        assert_eq!(
            winding_number(&system, Complex64::new(0.0, 0.0), 1.0, 256).unwrap(),
            0
        );
    }

    #[test]
    fn scan_finds_cosh_zero() {
        let system = half_product_system();
        let report = scan_zeros(&system, 4.0, 64).unwrap();
        let zero = report.min_modulus_zero.expect("a zero near i pi");
        assert!((zero.norm() - std::f64::consts::PI).abs() < 1e-6, "{zero}");
        assert!(report.zeros[0].residual <= ZERO_RESIDUAL_REL * report.grid_max);
        // winding count on the outermost circle matches the roots inside
        let outer = report.winding_evidence.last().unwrap();
        let inside = report
            .zeros
            .iter()
            .filter(|loc| loc.z.norm() < outer.circle_radius)
            .count() as i64;
        assert_eq!(outer.winding, inside);
    }

    #[test]
    fn empty_system_has_no_zeros() {
        let empty = SpinSystem::new(vec![Space::uniform(2); 2], vec![]);
        let report = scan_zeros(&empty, 2.0, 24).unwrap();
        assert!(report.zeros.is_empty());
        assert!(report.min_modulus_zero.is_none());
    }

    #[test]
    fn zero_free_disc_is_clean() {
        let system = half_product_system();
        // r = 2, c = 1: radius 1/3
        let report = scan_zeros(&system, 1.0 / 3.0, 24).unwrap();
        assert!(report.zeros.is_empty());
        for circle in &report.winding_evidence {
            assert_eq!(circle.winding, 0);
        }
    }
}
