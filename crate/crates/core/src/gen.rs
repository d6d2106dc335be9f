//! Seeded random instance families for tests, benches and experiments.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::matset::{validate_set, MatrixSet, ValidationMode};
use crate::sat::{Clause, CnfFormula, Literal};

/// Random zero pattern with edge probability `density`, patched so no row
/// is empty, then given random positive weights normalized per row.
pub fn stochastic_set<R: Rng>(rng: &mut R, n: usize, m: usize, density: f64) -> MatrixSet {
    let raw: Vec<Vec<Vec<f64>>> = (0..m)
        .map(|_| stochastic_matrix(rng, n, density, false))
        .collect();
    validate_set(&raw, ValidationMode::Stochastic).expect("rows are normalized")
}

/// Like [`stochastic_set`] but every diagonal entry is positive.
pub fn positive_diagonal_set<R: Rng>(rng: &mut R, n: usize, m: usize, density: f64) -> MatrixSet {
    let raw: Vec<Vec<Vec<f64>>> = (0..m)
        .map(|_| stochastic_matrix(rng, n, density, true))
        .collect();
    validate_set(&raw, ValidationMode::PositiveDiagonal).expect("diagonal is set")
}

/// Transposes of [`stochastic_set`] matrices: every column sums to one.
pub fn column_stochastic_set<R: Rng>(rng: &mut R, n: usize, m: usize, density: f64) -> MatrixSet {
    loop {
        // a column of zeros in the transpose would be a zero row
        let s = stochastic_set(rng, n, m, density);
        if let Ok(t) = s.transposed() {
            return t;
        }
    }
}

fn stochastic_matrix<R: Rng>(rng: &mut R, n: usize, density: f64, diagonal: bool) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n)
                .map(|j| {
                    if (diagonal && i == j) || rng.random_bool(density) {
                        rng.random_range(0.05..1.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            if row.iter().all(|&v| v == 0.0) {
                row[rng.random_range(0..n)] = 1.0;
            }
            let sum: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= sum);
            row
        })
        .collect()
}

/// Uniform random 3-CNF: each clause draws three literals independently.
pub fn random_3sat<R: Rng>(rng: &mut R, vars: usize, clauses: usize) -> CnfFormula {
    let mut lits: Vec<usize> = (0..vars).collect();
    let cs: Vec<Clause> = (0..clauses)
        .map(|_| {
            lits.shuffle(rng);
            let pick = |rng: &mut R, k: usize| Literal {
                var: if vars >= 3 {
                    lits[k]
                } else {
                    rng.random_range(0..vars)
                },
                positive: rng.random_bool(0.5),
            };
            [pick(rng, 0), pick(rng, 1), pick(rng, 2)]
        })
        .collect();
    CnfFormula::new(vars, cs).expect("variables in range")
}
