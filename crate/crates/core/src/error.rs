use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "delta pair requires gamma = 1 (got {gamma}): for other values the upper component \
         cannot stay continuous at the atom"
    )]
    DeltaContinuity { gamma: f64 },

    #[error("quadrature for {what} did not converge: achieved error {achieved:e}, requested {requested:e}")]
    QuadratureNonConvergence {
        what: String,
        achieved: f64,
        requested: f64,
    },

    #[error("degenerate Pade denominator: {0}")]
    DegeneratePade(String),

    #[error("no bound state detected for E in ({lower}, {upper})")]
    NoBoundState { lower: f64, upper: f64 },

    #[error("integration failed near x = {at}: {reason}")]
    Integration { at: f64, reason: String },

    #[error("decay fit failed: {0}")]
    Fit(String),

    #[error("unsupported potential for this solver: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
