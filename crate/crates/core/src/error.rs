use thiserror::Error;

use crate::dirac::AmplitudeTrajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("incompatible grids")]
    IncompatibleGrids,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("time out of range: t = {t} outside [{min}, {max}]")]
    TimeOutOfRange { t: f64, min: f64, max: f64 },

    #[error("eigensolver did not converge (eigenpair index {index})")]
    NoConvergence { index: usize },

    #[error("non-finite state after slice {slice}")]
    NonFiniteState { slice: usize },

    #[error("slice {slice} failed: {source}")]
    Slice {
        slice: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("zero-norm state")]
    ZeroNorm,

    #[error("order too large: n = {n} exceeds cap {max}")]
    OrderTooLarge { n: usize, max: usize },

    #[error("diagonal amplitude undefined at first order (m = n = {0})")]
    DiagonalAmplitude(usize),

    #[error("non-finite amplitude at step {step} (t = {time})")]
    AmplitudeDiverged {
        step: usize,
        time: f64,
        /// Trajectory up to the last finite step.
        partial: Box<AmplitudeTrajectory>,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
