//! Power moments E f^s of a spin system, computed from expectations of
//! factor products E(phi_{i1} ... phi_{is}) by enumeration over the union
//! of scopes. Tuples are grouped by multiset with multinomial weights, and
//! expectations factorize over connected scope components.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spinmodel::{for_each_assignment, SpinSystem};

/// Default budget, in elementary table reads.
pub const DEFAULT_COST_CEILING: f64 = 1e9;

#[derive(Debug, Clone)]
pub struct MomentRequest<'a> {
    pub system: &'a SpinSystem,
    pub max_order: usize,
    pub cost_ceiling: f64,
}

impl<'a> MomentRequest<'a> {
    pub fn new(system: &'a SpinSystem, max_order: usize) -> Self {
        MomentRequest {
            system,
            max_order,
            cost_ceiling: DEFAULT_COST_CEILING,
        }
    }
}

/// values[s] = E f^s for s = 0..max_order, with values[0] = 1 exactly.
#[derive(Debug, Clone)]
pub struct MomentSequence {
    pub values: Vec<Complex64>,
}

/// Binomial coefficient in f64 via the multiplicative formula.
pub(crate) fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 1..=k {
        acc *= (n - k + i) as f64 / i as f64;
    }
    acc
}

/// Multinomial coefficient (sum counts)! / prod counts! in f64.
fn multinomial_f64(counts: &[usize]) -> f64 {
    let mut acc = 1.0f64;
    let mut total = 0usize;
    for &c in counts {
        total += c;
        acc *= binomial_f64(total, c);
    }
    acc
}

/// Enumerate all multisets of the given size over items 0..m, presented as
/// (item, count) pairs with count >= 1, and fold them through `visit`.
/// Deterministic lexicographic order.
pub(crate) fn for_each_multiset(
    m: usize,
    size: usize,
    visit: &mut dyn FnMut(&[(usize, usize)], f64) -> Result<()>,
) -> Result<()> {
    fn recurse(
        m: usize,
        item: usize,
        remaining: usize,
        current: &mut Vec<(usize, usize)>,
        visit: &mut dyn FnMut(&[(usize, usize)], f64) -> Result<()>,
    ) -> Result<()> {
        if remaining == 0 {
            let counts: Vec<usize> = current.iter().map(|&(_, c)| c).collect();
            return visit(current, multinomial_f64(&counts));
        }
        if item == m {
            return Ok(());
        }
        // count 0 for this item
        recurse(m, item + 1, remaining, current, visit)?;
        for count in 1..=remaining {
            current.push((item, count));
            let out = recurse(m, item + 1, remaining - count, current, visit);
            current.pop();
            out?;
        }
        Ok(())
    }
    let mut current = Vec::new();
    recurse(m, 0, size, &mut current, visit)
}

/// Multiset-grouped power moments for an arbitrary expectation backend:
/// values[s] = sum over multisets of size s of multinomial * E(prod phi^count).
pub(crate) fn multiset_power_moments(
    m: usize,
    max_order: usize,
    expect: &mut dyn FnMut(&[(usize, usize)]) -> Result<Complex64>,
) -> Result<Vec<Complex64>> {
    let mut values = Vec::with_capacity(max_order + 1);
    values.push(Complex64::new(1.0, 0.0));
    for s in 1..=max_order {
        let mut acc = Complex64::new(0.0, 0.0);
        for_each_multiset(m, s, &mut |multiset, coeff| {
            acc += expect(multiset)? * coeff;
            Ok(())
        })?;
        values.push(acc);
    }
    Ok(values)
}

/// Memoizing evaluator for factor-product expectations of one system.
pub struct MomentEngine<'a> {
    system: &'a SpinSystem,
    cache: HashMap<Vec<usize>, Complex64>,
}

impl<'a> MomentEngine<'a> {
    pub fn new(system: &'a SpinSystem) -> Self {
        MomentEngine {
            system,
            cache: HashMap::new(),
        }
    }

    /// E(prod over the tuple of phi_i), memoized by sorted multiset.
    pub fn expectation(&mut self, tuple: &[usize]) -> Result<Complex64> {
        let m = self.system.num_factors();
        for &i in tuple {
            if i >= m {
                return Err(Error::Domain(format!("factor index {i} out of range (m = {m})")));
            }
        }
        let mut key: Vec<usize> = tuple.to_vec();
        key.sort_unstable();
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let value = self.compute(&key)?;
        self.cache.insert(key, value);
        Ok(value)
    }

    fn compute(&mut self, sorted_tuple: &[usize]) -> Result<Complex64> {
        if sorted_tuple.is_empty() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        // (factor index, multiplicity) pairs
        let mut groups: Vec<(usize, usize)> = Vec::new();
        for &i in sorted_tuple {
            match groups.last_mut() {
                Some((j, c)) if *j == i => *c += 1,
                _ => groups.push((i, 1)),
            }
        }
        let mut value = Complex64::new(1.0, 0.0);
        for component in connected_components(self.system, &groups) {
            value *= self.component_expectation(&component)?;
        }
        Ok(value)
    }

    /// Direct enumeration over the scope union of one connected group.
    fn component_expectation(&self, group: &[(usize, usize)]) -> Result<Complex64> {
        let mut union: Vec<usize> = group
            .iter()
            .flat_map(|&(i, _)| self.system.factors[i].scope.iter().copied())
            .collect();
        union.sort_unstable();
        union.dedup();
        let sizes: Vec<usize> = union.iter().map(|&j| self.system.spaces[j].size).collect();

        // position of each coordinate in the union
        let pos_of: HashMap<usize, usize> =
            union.iter().enumerate().map(|(p, &j)| (j, p)).collect();
        // per factor: (union positions of its scope, scope sizes, multiplicity)
        let plans: Vec<(Vec<usize>, Vec<usize>, usize, usize)> = group
            .iter()
            .map(|&(i, count)| {
                let f = &self.system.factors[i];
                let positions: Vec<usize> = f.scope.iter().map(|&j| pos_of[&j]).collect();
                let scope_sizes: Vec<usize> =
                    f.scope.iter().map(|&j| self.system.spaces[j].size).collect();
                (positions, scope_sizes, i, count)
            })
            .collect();

        let mut acc = Complex64::new(0.0, 0.0);
        for_each_assignment(&sizes, |assign| {
            let mut weight = 1.0f64;
            for (p, &j) in union.iter().enumerate() {
                weight *= self.system.spaces[j].probs[assign[p]];
            }
            let mut prod = Complex64::new(weight, 0.0);
            for (positions, scope_sizes, i, count) in &plans {
                let mut idx = 0usize;
                for (k, &p) in positions.iter().enumerate() {
                    idx = idx * scope_sizes[k] + assign[p];
                }
                let v = self.system.factors[*i].table[idx];
                prod *= v.powi(*count as i32);
            }
            acc += prod;
        });
        Ok(acc)
    }
}

/// Group a multiset of factors into connected components of overlapping scopes.
fn connected_components(system: &SpinSystem, groups: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let k = groups.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for (g, &(i, _)) in groups.iter().enumerate() {
        for &j in &system.factors[i].scope {
            if let Some(&other) = seen.get(&j) {
                let a = find(&mut parent, g);
                let b = find(&mut parent, other);
                parent[a] = b;
            } else {
                seen.insert(j, g);
            }
        }
    }
    let mut buckets: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (g, &pair) in groups.iter().enumerate() {
        buckets.entry(find(&mut parent, g)).or_default().push(pair);
    }
    let mut out: Vec<Vec<(usize, usize)>> = buckets.into_values().collect();
    out.sort_by_key(|c| c[0]);
    out
}

/// Expectation of a product of factors, coordinates outside the scope union
/// integrated out implicitly.
pub fn factor_product_expectation(system: &SpinSystem, tuple: &[usize]) -> Result<Complex64> {
    MomentEngine::new(system).expectation(tuple)
}

/// E f^s by multiset-grouped summation of factor-product expectations.
pub fn power_moment(system: &SpinSystem, s: usize) -> Result<Complex64> {
    let mut engine = MomentEngine::new(system);
    let mut acc = Complex64::new(0.0, 0.0);
    if s == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    for_each_multiset(system.num_factors(), s, &mut |multiset, coeff| {
        let tuple: Vec<usize> = multiset
            .iter()
            .flat_map(|&(i, c)| std::iter::repeat(i).take(c))
            .collect();
        acc += engine.expectation(&tuple)? * coeff;
        Ok(())
    })?;
    Ok(acc)
}

/// Estimated enumeration cost of the multiset route, in table reads.
fn multiset_cost_estimate(system: &SpinSystem, max_order: usize) -> f64 {
    let n = system.num_coordinates();
    let m = system.num_factors();
    let q = system.max_space_size() as f64;
    let r = system.arity();
    let mut total = 0.0f64;
    for s in 1..=max_order {
        let count = binomial_f64(m + s - 1, s);
        let dims = (s * r).min(n) as f64;
        total += count * q.powf(dims);
        if !total.is_finite() {
            return f64::INFINITY;
        }
    }
    total
}

/// Full moment sequence up to the requested order.
///
/// Two value-identical routes: multiset grouping per the cost model above,
/// or a single pass over the whole configuration space accumulating all
/// powers at once. The cheaper route is taken; if both exceed the ceiling
/// the request is refused rather than truncated.
pub fn moment_sequence(request: &MomentRequest) -> Result<MomentSequence> {
    let system = request.system;
    let max_order = request.max_order;
    let direct_cost = system.configuration_count()
        * (system.num_factors() as f64 + max_order as f64 + 1.0);
    let multiset_cost = multiset_cost_estimate(system, max_order);

    let mut values = if direct_cost <= multiset_cost {
        if direct_cost > request.cost_ceiling {
            return Err(Error::CostCeiling {
                estimate: direct_cost.min(multiset_cost),
                ceiling: request.cost_ceiling,
            });
        }
        direct_moments(system, max_order)
    } else {
        if multiset_cost > request.cost_ceiling {
            return Err(Error::CostCeiling {
                estimate: direct_cost.min(multiset_cost),
                ceiling: request.cost_ceiling,
            });
        }
        let mut engine = MomentEngine::new(system);
        multiset_power_moments(system.num_factors(), max_order, &mut |multiset| {
            let tuple: Vec<usize> = multiset
                .iter()
                .flat_map(|&(i, c)| std::iter::repeat(i).take(c))
                .collect();
            engine.expectation(&tuple)
        })?
    };
    values[0] = Complex64::new(1.0, 0.0);
    Ok(MomentSequence { values })
}

/// One pass over all configurations, accumulating every power of f.
fn direct_moments(system: &SpinSystem, max_order: usize) -> Vec<Complex64> {
    let sizes: Vec<usize> = system.spaces.iter().map(|s| s.size).collect();
    let mut values = vec![Complex64::new(0.0, 0.0); max_order + 1];
    for_each_assignment(&sizes, |config| {
        let mut weight = 1.0f64;
        for (j, &s) in config.iter().enumerate() {
            weight *= system.spaces[j].probs[s];
        }
        let f = system.f_value(config);
        let mut power = Complex64::new(weight, 0.0);
        for v in values.iter_mut() {
            *v += power;
            power *= f;
        }
    });
    values
}
