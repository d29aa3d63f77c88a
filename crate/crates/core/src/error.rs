use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not pseudo-orthogonal for the given metric")]
    NotPseudoOrthogonal,

    #[error("degenerate span: {0}")]
    DegenerateSpan(String),

    #[error("vector is not in the normal space (residual {residual:e})")]
    NotNormal { residual: f64 },

    #[error("null normal direction is not supported")]
    NullNormal,

    #[error("level {c} is outside the regular range {interval}")]
    OutsideRegularRange { c: f64, interval: String },

    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("did not converge: {0}")]
    NonConvergence(String),

    #[error("relation check failed: {0}")]
    Verification(String),

    #[error("identity violated: {0}")]
    IdentityViolated(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
