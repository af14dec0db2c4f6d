use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("base {base} is not coprime to modulus {modulus}")]
    NotCoprime { base: u64, modulus: u64 },
    #[error("dimension {dim} exceeds guard {guard} (set SHOR_SPECTRA_MAX_DIM to override)")]
    DimensionTooLarge { dim: usize, guard: usize },
    #[error("bad dimension {dim}: {reason}")]
    BadDimension { dim: usize, reason: String },
    #[error("matrix is not unitary: max deviation {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("theta {theta} is not an eigenangle of S; nearest valid angle is {nearest}")]
    InvalidTheta { theta: f64, nearest: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("verification failed: {}", .0.join("; "))]
    VerificationFailure(Vec<String>),
    #[error("malformed matrix dump: {0}")]
    MalformedDump(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
