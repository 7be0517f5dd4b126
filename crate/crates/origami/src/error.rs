use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {context} (expected {expected}, got {actual})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A probability vector failed validation.
    #[error("invalid probability vector: {0}")]
    InvalidProbVector(String),

    /// A loss matrix failed validation.
    #[error("invalid loss matrix: {0}")]
    InvalidLossMatrix(String),

    /// An outcome or action index is out of range.
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    /// A fold was given identical source and target indices.
    #[error("fold source and target must differ (both {0})")]
    FoldSourceEqualsTarget(usize),

    /// The probability-weighted set extension was applied without a
    /// distribution to take the weights from.
    #[error("weighted-sum extension requires a probability vector context")]
    MissingWeightContext,

    /// An argument was empty or otherwise unusable.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A stopping rule cannot be satisfied for the given matrix.
    #[error("stop rule unsatisfiable: {0}")]
    UnsatisfiableStop(String),

    /// The linear program has an empty feasible region.
    #[error("linear program is infeasible")]
    LpInfeasible,

    /// The linear program is unbounded over its feasible region.
    #[error("linear program is unbounded")]
    LpUnbounded,

    /// Training produced a non-finite loss.
    #[error("training diverged: {0}")]
    Divergence(String),

    /// Shapes of a model and its input disagree.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A file could not be parsed; `line` and `column` are 1-based where known.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
