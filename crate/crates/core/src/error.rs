use num_complex::Complex64;

/// Errors raised by the numerical routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("pole at z = {0}")]
    Pole(Complex64),

    #[error("numerical tolerance not met: {0}")]
    Tolerance(String),

    #[error("support reached the truncation window on edge `{edge}`")]
    Truncation { edge: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("time {t} is not commensurate with the grid (c*t/dx = {cells})")]
    NonCommensurate { t: f64, cells: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
