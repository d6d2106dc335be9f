//! Seeded workloads shared by the benchmarks.

use colprim_core::{gen, validate_set, CnfFormula, MatrixSet, ValidationMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0xC0_1DEC;

/// Two-letter stochastic set on `n` states with about three positive
/// entries per row.
pub fn stochastic(n: usize) -> MatrixSet {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ n as u64);
    gen::stochastic_set(&mut rng, n, 2, (3.0 / n as f64).min(0.6))
}

pub fn positive_diagonal(n: usize) -> MatrixSet {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ ((n as u64) << 8));
    gen::positive_diagonal_set(&mut rng, n, 2, 1.0 / n as f64)
}

pub fn formula(vars: usize, clauses: usize) -> CnfFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ (vars * 31 + clauses) as u64);
    gen::random_3sat(&mut rng, vars, clauses)
}

/// Černý automaton: a cyclic shift and a map merging the last state into
/// the first. Its shortest reset word has length `(n − 1)²`.
pub fn cerny(n: usize) -> MatrixSet {
    let map = |f: &dyn Fn(usize) -> usize| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                let mut row = vec![0.0; n];
                row[f(i)] = 1.0;
                row
            })
            .collect()
    };
    let shift = map(&|i| (i + 1) % n);
    let merge = map(&|i| if i == n - 1 { 0 } else { i });
    validate_set(&[shift, merge], ValidationMode::Binary).expect("binary maps")
}
