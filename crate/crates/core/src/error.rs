use alloc::string::String;

/// Errors raised by the models in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error("y-mode elimination is singular at omega = {omega}")]
    DegenerateElimination { omega: f64 },
    #[error("response matrix is singular at omega = {omega}")]
    SingularResponse { omega: f64 },
    #[error("nonreciprocal strength is undefined: both off-diagonal couplings vanish")]
    UndefinedSigma,
    #[error("no closed form available: {0}")]
    UnsupportedClosedForm(String),
    #[error("delay grid misaligned: {0}")]
    GridMisaligned(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParams {
        field,
        reason: reason.into(),
    }
}
