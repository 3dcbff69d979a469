use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("out of range: {0}")]
    Range(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("perturbation too large: {0}")]
    PerturbationTooLarge(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("calibration failure: {0}")]
    CalibrationFailure(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
