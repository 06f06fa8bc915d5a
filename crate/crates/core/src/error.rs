use thiserror::Error;

/// Errors produced by the channel models, optimizers and scenario loader.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("device {device} receives no light from any LED element")]
    UnservableDevice { device: usize },

    #[error("harvest target {target:.6e} W is not below the saturation level {max:.6e} W")]
    TargetUnreachable { target: f64, max: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("solver stalled after {iterations} iterations (relative gap {gap:.3e})")]
    SolverStall { iterations: usize, gap: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
