use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("map is not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("not completely positive (Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("matrix is not an isometry (residual {residual:.3e})")]
    NotIsometry { residual: f64 },

    #[error("outcome {index} has probability {probability:.3e}, below the feasibility threshold")]
    ImprobableOutcome { index: usize, probability: f64 },

    #[error("expectation {value} is not covered by any feedback bin")]
    UncoveredValue { value: f64 },

    #[error("retraction failed: S + T is rank deficient")]
    RankDeficient,

    #[error("point is not critical (gradient norm {grad_norm:.3e} > {tolerance:.1e})")]
    NotCritical { grad_norm: f64, tolerance: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
