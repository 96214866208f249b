//! Seeded random admissible systems, for cross-checking the approximation
//! pipeline against the enumeration oracle on inputs nobody hand-picked.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spinmodel::{Factor, Space, SpinSystem};

/// Size envelope for a generated system.
#[derive(Debug, Clone)]
pub struct CorpusParams {
    pub max_coordinates: usize,
    pub max_space_size: usize,
    pub max_arity: usize,
    pub max_factors: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            max_coordinates: 10,
            max_space_size: 3,
            max_arity: 3,
            max_factors: 12,
        }
    }
}

/// Draw a random system within the envelope. Factor tables are complex
/// with entries rescaled so every single-coordinate flip moves the value
/// by at most 1, so the draw is always admissible.
pub fn random_system(seed: u64, params: &CorpusParams) -> SpinSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=params.max_coordinates);
    let spaces: Vec<Space> = (0..n)
        .map(|_| {
            let size = rng.gen_range(2..=params.max_space_size);
            let raw: Vec<f64> = (0..size).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            Space {
                size,
                probs: raw.iter().map(|p| p / total).collect(),
            }
        })
        .collect();
    let m = rng.gen_range(0..=params.max_factors);
    let factors = (0..m)
        .map(|_| {
            let arity = rng.gen_range(1..=params.max_arity.min(n));
            let mut scope: Vec<usize> = (0..n).collect();
            for i in 0..arity {
                let j = rng.gen_range(i..n);
                scope.swap(i, j);
            }
            scope.truncate(arity);
            let sizes: Vec<usize> = scope.iter().map(|&j| spaces[j].size).collect();
            let len: usize = sizes.iter().product();
            let mut table: Vec<Complex64> = (0..len)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            normalize_lipschitz(&mut table, &sizes);
            Factor { scope, table }
        })
        .collect();
    SpinSystem::new(spaces, factors)
}

/// Rescale a table so the largest single-flip difference is at most 1.
fn normalize_lipschitz(table: &mut [Complex64], sizes: &[usize]) {
    let mut worst = 0.0f64;
    let positions = sizes.len();
    let total = table.len();
    for idx in 0..total {
        // decode mixed-radix index, last coordinate fastest
        let mut digits = vec![0usize; positions];
        let mut rest = idx;
        for p in (0..positions).rev() {
            digits[p] = rest % sizes[p];
            rest /= sizes[p];
        }
        for p in 0..positions {
            let stride: usize = sizes[p + 1..].iter().product();
            for alt in 0..sizes[p] {
                if alt == digits[p] {
                    continue;
                }
                let other_idx =
                    (idx as i64 + (alt as i64 - digits[p] as i64) * stride as i64) as usize;
                worst = worst.max((table[idx] - table[other_idx]).norm());
            }
        }
    }
    if worst > 1.0 {
        for v in table.iter_mut() {
            *v /= worst;
        }
    }
}
