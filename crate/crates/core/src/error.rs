use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("singular matrix: pivot {pivot:e} below tolerance {tolerance:e}")]
    SingularMatrix { pivot: f64, tolerance: f64 },

    #[error("degenerate rank-one update: denominator {0:e}")]
    DegenerateUpdate(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cap {cap} is smaller than the largest weight magnitude {linf}")]
    CapTooSmall { cap: f64, linf: f64 },

    #[error("no restricted kernel vector exists on the free index set")]
    NoKernelVector,

    #[error("kernel direction vanishes on every free coordinate")]
    NoCrossing,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex iteration limit {0} reached")]
    IterationLimit(usize),

    #[error("tie-breaking vector degenerate after {0} redraws")]
    DegenerateTieBreaker(usize),

    #[error("unknown activation `{0}`")]
    UnknownActivation(String),

    #[error("activation matrix of layer {layer} has rank {rank} < {samples}")]
    DegenerateActivations {
        layer: usize,
        rank: usize,
        samples: usize,
    },

    #[error("exhaustive enumeration of {0} subsets exceeds the guard")]
    TooLarge(u128),

    #[error("measured error {measured:e} exceeds deterministic bound {bound:e}")]
    BoundViolated { measured: f64, bound: f64 },

    #[error("need at least {needed} sweep points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
