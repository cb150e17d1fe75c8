use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid material parameters: {0}")]
    Material(String),

    #[error("kernel evaluated at coincident points (|x - y| = {distance:e})")]
    Singular { distance: f64 },

    #[error("point {index} lies {distance:e} from the boundary, closer than the guard {guard:e}")]
    TooClose { index: usize, distance: f64, guard: f64 },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("linear system is numerically singular (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("discrete system residual {residual:e} exceeds tolerance")]
    Residual { residual: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
