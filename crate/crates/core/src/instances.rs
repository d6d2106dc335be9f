//! Small named matrix sets used throughout the docs, tests and benches.

use crate::matset::{validate_set, MatrixSet, ValidationMode};

/// Four-agent stochastic pair whose word `11221` has a positive second
/// column.
pub fn consensus_example() -> MatrixSet {
    let a1 = vec![
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.8, 0.2, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ];
    let a2 = vec![
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![1.0, 0.0, 0.0, 0.0],
    ];
    validate_set(&[a1, a2], ValidationMode::Stochastic).expect("valid")
}

/// Three-state, two-letter synchronizing semi-automaton (shortest reset
/// word `22`).
pub fn automaton_example() -> MatrixSet {
    let a1 = vec![
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![1.0, 0.0, 0.0],
    ];
    let a2 = vec![
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, 1.0],
    ];
    validate_set(&[a1, a2], ValidationMode::Binary).expect("valid")
}

/// Cyclic shift and a transposition on `n ≥ 2` states. Never
/// column-primitive: every product is a permutation.
pub fn permutation_pair(n: usize) -> MatrixSet {
    assert!(n >= 2);
    let perm = |map: &dyn Fn(usize) -> usize| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                let mut row = vec![0.0; n];
                row[map(i)] = 1.0;
                row
            })
            .collect()
    };
    let shift = perm(&|i| (i + 1) % n);
    let swap = perm(&|i| match i {
        0 => 1,
        1 => 0,
        i => i,
    });
    validate_set(&[shift, swap], ValidationMode::Binary).expect("valid")
}
