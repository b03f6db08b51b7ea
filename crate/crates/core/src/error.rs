use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} = {value} exceeds the guard limit {limit}")]
    Bounds {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("closed-form state count is not integral for lambda = {lambda}, n_F = {n_f}: {value}")]
    NonIntegralCount { lambda: u32, n_f: i64, value: String },

    #[error("pattern resolution too coarse: {samples} samples, need at least {required}")]
    Resolution { samples: usize, required: usize },

    #[error("top shell only partially filled: {occupied} of {degeneracy} states")]
    PartiallyFilledShell { occupied: u64, degeneracy: u64 },

    #[error("angular quadrature did not converge: node doubling changed the result by {delta:e}")]
    Quadrature { delta: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
