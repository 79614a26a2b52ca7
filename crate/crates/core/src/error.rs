use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("identity has no conjugation action; expected one of X, Y, Z")]
    IdentityPauli,

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("Kraus operators are not trace preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("Choi matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate polytope: {0}")]
    Degenerate(String),

    #[error("certificate failed verification: {0}")]
    BadCertificate(String),

    #[error("unrecognized facet signature: {0}")]
    UnrecognizedFacet(String),

    #[error("facet set inconsistency: {0}")]
    Inconsistent(String),

    #[error("no sign change of criterion {criterion} on [{lo}, {hi}]")]
    NoSignChange { criterion: String, lo: f64, hi: f64 },

    #[error("postselection probability {0:.3e} is too small")]
    ZeroProbability(f64),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
