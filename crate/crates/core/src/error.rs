use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two scales are too close for the finite-sum coefficients to be
    /// computed reliably at the requested precision.
    #[error(
        "ill-conditioned term set: scales {first} and {second} (indices {first_index}, {second_index}) \
         have relative gap {gap:e} below the guard {guard:e}"
    )]
    IllConditioned { first_index: usize, second_index: usize, first: f64, second: f64, gap: f64, guard: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
