//! Column-primitivity of finite sets of nonnegative matrices.
//!
//! A set of stochastic matrices admits a switching sequence driving
//! `x(t+1) = A_{σ(t)} x(t)` to consensus exactly when some product of its
//! matrices has an all-positive column. This crate decides that property in
//! polynomial time on the digraph of pairs, synthesizes explicit words,
//! simulates the switched system, and builds the 3-SAT instances showing
//! that the shortest such word is hard to find.
//!
//! ```
//! use colprim_core::{build_pair_digraph, decide_column_primitive, instances, synthesize_word};
//!
//! let set = instances::consensus_example();
//! let g = build_pair_digraph(&set);
//! assert!(decide_column_primitive(&g).is_column_primitive());
//! let cert = synthesize_word(&set, &g).unwrap();
//! assert!(cert.verify(&set));
//! ```

pub mod error;
pub mod gen;
pub mod instances;
pub mod matset;
pub mod pairs;
pub mod sat;
pub mod sim;
pub mod synth;

pub use error::{Error, Result};
pub use matset::{
    dominates, pattern_product, positive_column, product, validate_set, ClassFlags, Matrix,
    MatrixSet, MatrixSetFile, NamedMatrix, ValidationMode, Word, ZeroPattern,
};
pub use pairs::{
    build_pair_digraph, decide_column_primitive, is_column_primitive, Decision, PairDigraph,
    PairEdge, PairNode,
};
pub use sat::{
    claim1_check, parse_dimacs, reduce, verify_reduction, CnfFormula, Literal, ReductionCheck,
    ReductionSet,
};
pub use sim::{
    contraction_check, diameter, push_sum_run, push_sum_run_transposed,
    random_switching_experiment, run, ContractionReport, ExperimentConfig, ExperimentSummary,
    PushSumState, Schedule, Trajectory,
};
pub use synth::{
    extract_selections, intree_decide, length_bounds, shortest_word_bruteforce, synthesize_word,
    InTreeOutcome, LengthBounds, SelectionSequence, SynthesisResult, Witness,
};
