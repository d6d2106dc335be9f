use thiserror::Error;

/// Errors raised across the library. Matrix, row and column indices are
/// 1-based in messages so they line up with the input files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix set is empty")]
    EmptySet,

    #[error("matrix {matrix}: expected {expected}x{expected}, row {row} has {found} entries")]
    NotSquare {
        matrix: usize,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("matrix {matrix}: dimension {found} differs from {expected}")]
    DimensionMismatch {
        matrix: usize,
        expected: usize,
        found: usize,
    },

    #[error("matrix {matrix}: entry ({row},{col}) is not finite")]
    NonFinite {
        matrix: usize,
        row: usize,
        col: usize,
    },

    #[error("matrix {matrix}: entry ({row},{col}) = {value} is negative")]
    NegativeEntry {
        matrix: usize,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("matrix {matrix}: row {row} is zero")]
    ZeroRow { matrix: usize, row: usize },

    #[error("matrix {matrix}: row {row} sums to {sum}, expected 1")]
    RowSumViolation { matrix: usize, row: usize, sum: f64 },

    #[error("matrix {matrix}: entry ({row},{col}) = {value} is not 0 or 1")]
    NonBinaryEntry {
        matrix: usize,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("matrix {matrix}: row {row} has {ones} ones, expected exactly one")]
    NotBinaryStochastic {
        matrix: usize,
        row: usize,
        ones: usize,
    },

    #[error("matrix {matrix}: diagonal entry {index} is not positive")]
    ZeroDiagonal { matrix: usize, index: usize },

    #[error("letter {letter} is out of range for a set of {m} matrices")]
    InvalidLetter { letter: usize, m: usize },

    #[error("vector has length {found}, expected {expected}")]
    VectorLength { expected: usize, found: usize },

    #[error("word is empty")]
    EmptyWord,

    #[error("cannot parse word {0:?}")]
    BadWord(String),

    #[error("matrix set is not column-primitive")]
    NotColumnPrimitive,

    #[error("word product has no positive column")]
    NotPositiveColumn,

    #[error("matrix set does not have a positive diagonal")]
    NotPositiveDiagonal,

    #[error("matrix set is not stochastic")]
    NotStochastic,

    #[error("matrix {matrix}: column {col} sums to {sum}, expected 1")]
    NotColumnStochastic { matrix: usize, col: usize, sum: f64 },

    #[error("invalid letter probabilities: {0}")]
    BadProbabilities(String),

    #[error("search exceeded its budget of {0} states")]
    StateSpaceExceeded(usize),

    #[error("malformed DIMACS input at line {line}: {reason}")]
    MalformedDimacs { line: usize, reason: String },

    #[error("clause {0} has more than three literals")]
    ClauseTooWide(usize),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid matrix-set file: {0}")]
    BadFile(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
