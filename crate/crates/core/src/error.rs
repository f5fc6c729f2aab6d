use thiserror::Error;

/// Errors raised by model construction, analysis and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("payoffs violate the Prisoner's Dilemma ordering T > R > P > S")]
    NotPrisonersDilemma,

    #[error("operation requires the reduced (single-parameter) game")]
    RequiresReducedGame,

    #[error("x = {x} is not a fixed point (velocity {velocity:e})")]
    NotAFixedPoint { x: f64, velocity: f64 },

    #[error("trajectory has {len} samples, need at least {min}")]
    TrajectoryTooShort { len: usize, min: usize },

    #[error("trajectory hit the step limit without a monotone tail")]
    NoMonotoneTail,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value,
        reason,
    }
}
