use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("field evaluated at a source position ({0})")]
    Singularity(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("target plane z = {target} lies behind the reference plane z = {reference}")]
    BackPropagation { target: f64, reference: f64 },

    #[error("direction sin(alpha) = {sin_alpha} falls outside the filtered band")]
    OutOfBand { sin_alpha: f64 },

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("scan {index} has a zero reference value")]
    ZeroReference { index: usize },

    #[error("oracle curve is identically zero")]
    ZeroOracle,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
