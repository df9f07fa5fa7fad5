use thiserror::Error;

/// Errors raised by hypervector construction, algebra, encoding and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HvError {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("space mismatch: expected {expected}, found {found}")]
    SpaceMismatch { expected: String, found: String },

    #[error("metric {metric} is not defined for {space} hypervectors")]
    MetricMismatch { metric: String, space: String },

    #[error("jaccard similarity is undefined for two all-zero vectors")]
    JaccardUndefined,

    #[error("empty input")]
    EmptyInput,

    #[error("normalization {norm} is incompatible with {space} hypervectors")]
    NormIncompatible { norm: String, space: String },

    #[error("{model} does not support {operation}")]
    Unsupported { model: String, operation: String },

    #[error("permutation is not a bijection: {0}")]
    NotBijective(String),

    #[error("binding matrix is not invertible")]
    NotInvertible,

    #[error("block-sparse operand is not in canonical (one active component per block) form")]
    NotCanonical,

    #[error("duplicate identifier {0:?}")]
    DuplicateId(String),

    #[error("unknown identifier {0:?}")]
    UnknownId(String),

    #[error("value {value} outside range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("self-loop on node {0:?}")]
    SelfLoop(String),

    #[error("stack is empty")]
    EmptyStack,

    #[error("malformed hypervector data: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, HvError>;
