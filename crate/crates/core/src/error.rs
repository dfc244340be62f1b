use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate kinematics: {0}")]
    DegenerateKinematics(String),

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("no convergence: {message} (best estimate {estimate:e}, error bound {error_bound:e})")]
    Convergence {
        message: String,
        estimate: f64,
        error_bound: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
