use std::fmt;
use std::process::ExitCode;

/// Exit statuses: 0 success, 1 I/O, 2 invalid input, 3 oracle failure,
/// 4 convergence failure.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    OracleFailed(String),
    Convergence(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io(_) => 1,
            CliError::Input(_) => 2,
            CliError::OracleFailed(_) => 3,
            CliError::Convergence(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::OracleFailed(m) => write!(f, "oracle failure: {m}"),
            CliError::Convergence(m) => write!(f, "convergence failure: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<polcorr_core::Error> for CliError {
    fn from(e: polcorr_core::Error) -> Self {
        use polcorr_core::Error as E;
        match e {
            E::Convergence { .. } => CliError::Convergence(e.to_string()),
            E::InvalidInput(_) | E::Domain(_) | E::DegenerateKinematics(_) => {
                CliError::Input(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}
