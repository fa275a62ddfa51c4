use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("non-positive base {0} in a positive real")]
    NonPositiveBase(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("the zero vector has no height")]
    ZeroVector,

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("archimedean Gram matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("twist weights at prime {prime} sum to {total} > 1")]
    WeightOverflow { prime: String, total: String },

    #[error("{what}: requested {requested} exceeds the cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("basis vectors are linearly dependent")]
    DependentBasis,

    #[error("indeterminate ultrametric cancellation: {0}")]
    Indeterminate(String),

    #[error("bundle is not split (non-diagonal Gram or non-monomial local matrix)")]
    NotSplit,

    #[error("no certified route: {0}")]
    RouteUnavailable(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("could not fully factor {0}")]
    Factorization(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
