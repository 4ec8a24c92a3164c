use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 1 or 2, got {0}")]
    InvalidDimension(usize),
    #[error("points per axis must be a power of two and at least 8, got {0}")]
    InvalidResolution(usize),
    #[error("torus extent must be positive and finite, got {0}")]
    InvalidExtent(f64),
    #[error("fractional order s must lie in (0, 1], got {0}")]
    InvalidOrder(f64),
    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),
    #[error("regularization level m must be at least 1")]
    InvalidRegularization,
    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("field contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("operation requires a nonzero field")]
    ZeroField,
    #[error("parameter {name} out of range: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("grid too small: boundary value {value:e} exceeds {threshold:e}")]
    GridTooSmall { value: f64, threshold: f64 },
    #[error("evolution produced a non-finite value at step {step} (t = {time})")]
    NonFiniteEvolution { step: usize, time: f64 },
    #[error("ground-state iteration diverged after {iterations} iterations")]
    Divergence { iterations: usize, trace: Vec<f64> },
    #[error("ground-state iterate collapsed to zero after {iterations} iterations")]
    ZeroCollapse { iterations: usize, trace: Vec<f64> },
    #[error("snapshot format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
