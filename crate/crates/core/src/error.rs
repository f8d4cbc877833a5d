use thiserror::Error;

/// Violations of the value-level invariants of the domain types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("value {0} is not on the temporal valence scale (-1, -0.5, 0, 0.5, 1)")]
    ValenceOutOfScale(f64),

    #[error("sentence must contain the mask marker exactly once, found {found}")]
    MaskCount { found: usize },

    #[error("sentence text is empty once the mask marker is removed")]
    EmptyText,

    #[error("identifier must not be empty")]
    EmptyId,

    #[error("token must not be empty")]
    EmptyToken,

    #[error("probability {probability} for token {token:?} is outside [0, 1]")]
    ProbabilityOutOfRange { token: String, probability: f64 },

    #[error("token {0:?} occurs more than once in the prediction list")]
    DuplicateToken(String),

    #[error("prediction list is empty")]
    EmptyPredictions,

    #[error("probability mass {mass} exceeds 1 (tolerance {tolerance:e})")]
    ProbabilityMassExceeded { mass: f64, tolerance: f64 },
}
