use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape has no points")]
    EmptyShape,

    #[error("shape file line {line}: {msg}")]
    ShapeParse { line: usize, msg: String },

    #[error("bitmap: {0}")]
    Bitmap(String),

    #[error("configuration must contain at least one robot")]
    EmptyConfiguration,

    #[error("robot {index} has a non-finite coordinate")]
    NonFinitePosition { index: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {msg}")]
    InvalidParameter { name: &'static str, msg: String },

    #[error("robots {i} and {j} are at distance {distance}, inside the singular radius")]
    SingularPair { i: usize, j: usize, distance: f64 },

    #[error("non-finite gradient for robot {index}")]
    NonFiniteGradient { index: usize },

    #[error("potential is not finite at a finite-difference probe (robot {index}, axis {axis})")]
    InfeasibleProbe { index: usize, axis: usize },

    #[error("could not place {placed} of {wanted} robots after {attempts} attempts")]
    Placement {
        placed: usize,
        wanted: usize,
        attempts: usize,
    },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, msg: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        msg: msg.into(),
    }
}
