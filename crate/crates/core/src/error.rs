use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid physical constants: {0}")]
    InvalidConstants(String),

    #[error("effective two-level model invalid: detuning ratio {ratio:.3} below required {required}")]
    EffectiveModelInvalid { ratio: f64, required: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid sensor parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate estimator: {0}")]
    DegenerateEstimator(String),

    #[error("uncertainty diverges: cos(phase) = 0 at phase {phase}")]
    DivergentUncertainty { phase: f64 },

    #[error("total depolarization (epsilon = 1): no signal survives")]
    TotalDepolarization,

    #[error("Zeno approximation invalid: Gamma*tau = {0} >= 1")]
    ApproximationInvalid(f64),

    #[error("no signal: visibility is zero")]
    NoSignal,

    #[error("serialization: {0}")]
    Serialization(String),
}
