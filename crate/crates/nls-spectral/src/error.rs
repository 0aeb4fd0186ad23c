use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid needs a power-of-two point count >= 8, got {0}")]
    BadPointCount(usize),
    #[error("grid length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("malformed field data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
