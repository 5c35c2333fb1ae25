use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry: {0}")]
    NonFinite(String),

    #[error("design matrix with intercept has rank {rank}, need {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("need at least {min} observations, got {n}")]
    TooFewObservations { n: usize, min: usize },

    #[error("quantile level must lie in {range}, got {alpha}")]
    InvalidAlpha { alpha: f64, range: &'static str },

    #[error("ranks must be a permutation of 1..=n: {0}")]
    NotAPermutation(String),

    #[error("base submatrix is singular")]
    SingularBase,

    #[error("degenerate fit: {0}")]
    Degenerate(String),

    #[error("simplex iteration limit of {limit} exceeded")]
    IterationLimit { limit: usize },

    #[error("invalid linear program: {0}")]
    InvalidProblem(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("csv error at line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("missing or misnamed column: expected {0}")]
    MissingColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid generator spec: {0}")]
    InvalidGenerator(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
