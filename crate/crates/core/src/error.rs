use thiserror::Error;

/// Errors raised by kernel construction, evaluation and witness search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {value} lies outside [-1, 1]")]
    Domain { value: f64 },

    /// Circle (and lower) dimensions are not covered by the characterization.
    #[error("unsupported sphere dimension {0}: only m >= 2 or infinity are supported")]
    UnsupportedDimension(i64),

    #[error("operation requires a finite sphere dimension")]
    RequiresFiniteDimension,

    #[error("invalid coefficient scheme: {0}")]
    InvalidScheme(String),

    #[error("coefficient family `{0}` does not provide a tail bound")]
    MissingTailBound(String),

    #[error("custom support mask metadata disagrees with sampled membership: {0}")]
    MaskInconsistent(String),

    #[error("operation requires a sparse (finite) coefficient scheme")]
    RequiresSparse,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid point set: {0}")]
    InvalidPoints(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("quadrature node iteration did not converge (nodes = {nodes})")]
    QuadratureNoConvergence { nodes: usize },

    #[error("no witness found up to {max_half} antipodal pairs; last smallest eigenvalue {last_min_eigenvalue:e}")]
    SearchExhausted {
        max_half: usize,
        last_min_eigenvalue: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
