use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("coincident atoms")]
    CoincidentAtoms,

    #[error("tie violates uniqueness of the nearest neighbour of atom {index}")]
    NearestNeighbourTie { index: usize },

    #[error("configuration needs at least {needed} atoms, got {got}")]
    TooFewAtoms { needed: usize, got: usize },

    #[error("no interior atoms (margin {margin} km)")]
    EmptyInterior { margin: f64 },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("quadrature did not converge: estimated error {achieved:e} > requested {requested:e} after {evals} evaluations")]
    Quadrature {
        achieved: f64,
        requested: f64,
        evals: usize,
    },

    #[error("series truncation bound {bound:e} exceeds tolerance {tolerance:e}")]
    Truncation { bound: f64, tolerance: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::Truncation { .. } | Error::Divergent(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
