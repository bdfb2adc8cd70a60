use thiserror::Error;

/// Errors raised by the simulator and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("parameter `{name}` out of range: {value} (allowed {allowed})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },

    #[error("no feed-forward correction exists for a failed Bell measurement")]
    FailedOutcome,

    #[error("empty data: {0}")]
    Empty(String),

    #[error("tomography input missing for state {0}")]
    MissingInput(&'static str),

    #[error("basis {0} has zero total counts")]
    ZeroCounts(&'static str),

    #[error("singular linear system in process reconstruction")]
    Singular,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            allowed: "[0, 1]",
        })
    }
}
