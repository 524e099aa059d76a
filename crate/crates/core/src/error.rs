use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("unknown unit `{unit}` for {quantity}")]
    UnknownUnit { quantity: &'static str, unit: String },

    #[error("mass matrix is not positive definite")]
    MassMatrixNotPositiveDefinite,

    #[error("constraint Schur complement is singular")]
    SingularConstraint,

    #[error("rotation matrix corrupted (det = {det})")]
    CorruptRotation { det: f64 },

    #[error("non-finite state at t = {t} s")]
    BlowUp { t: f64 },

    #[error("parameter {index} = {value} outside bounds [{lo}, {hi}]")]
    OutOfBounds { index: usize, value: f64, lo: f64, hi: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("optimizer failed: {0}")]
    OptimizerFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
