use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown coordinate symbol `{0}`")]
    UnknownCoordinate(String),
    #[error("point does not assign coordinate `{0}`")]
    MissingCoordinate(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("chart mismatch: {0}")]
    ChartMismatch(String),
    #[error("singular vielbein: {0}")]
    SingularVielbein(String),
    #[error("sphere section is not a Dirac eigenstate (spread {spread:.3e})")]
    NotAnEigenstate { spread: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("division by zero in exact arithmetic")]
    DivisionByZero,
}

pub type Result<T> = std::result::Result<T, Error>;
