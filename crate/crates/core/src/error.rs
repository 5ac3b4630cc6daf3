use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("not a density matrix: {0}")]
    InvalidState(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("scenario `{kind}` requires parameter `{name}`")]
    MissingParameter { kind: String, name: &'static str },
    #[error("unknown {what} `{token}`")]
    UnknownToken { what: &'static str, token: String },
    #[error("{param} = {value} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { param: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("mixture weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },
    #[error("regenerated state has vanishing trace {trace:e}")]
    DegenerateTrace { trace: f64 },
}

impl Error {
    /// True when the error stems from caller-supplied configuration rather
    /// than from a numerical failure inside the computation.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::MissingParameter { .. }
                | Error::UnknownToken { .. }
                | Error::OutOfDomain { .. }
                | Error::InvalidGrid(_)
                | Error::WeightSum { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
