use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The selected schedule produced a pole outside the open unit disk.
    #[error("alpha = {alpha} is outside (-1, 1); gamma = {gamma} is too small for the {rule} rule")]
    OutOfRange { alpha: f64, gamma: f64, rule: String },

    #[error("exponent real part {real_part:.3e} at omega = {omega} exceeds the safe limit {limit}")]
    Overflow { omega: f64, real_part: f64, limit: f64 },

    #[error("causality defect {defect:.3e} exceeds threshold {threshold:.3e}; increase fft_size")]
    NonCausal { defect: f64, threshold: f64 },

    #[error("spectral and Laurent kernel routes disagree by {residual:.3e} (tolerance {tolerance:.3e})")]
    SynthesisMismatch { residual: f64, tolerance: f64 },

    #[error("series of length {len} is too short for memory {memory}")]
    WindowTooShort { len: usize, memory: usize },

    #[error("evaluation window is empty")]
    EmptyWindow,

    #[error("{0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
