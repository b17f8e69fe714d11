use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("no peak found: {0}")]
    NoPeak(String),

    #[error("singular normal matrix: {0}")]
    Singular(String),

    #[error("fit did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("refusing to extrapolate: {value} outside calibrated range [{lo}, {hi}]")]
    ExtrapolationRefused { value: f64, lo: f64, hi: f64 },

    #[error("calibration energies are not increasing with pressure near {pressure} GPa")]
    NonMonotone { pressure: f64 },

    #[error("duplicate calibration pressure {0} GPa")]
    DuplicatePressure(f64),

    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("level {0} is not present in the trace")]
    MissingLevel(&'static str),

    #[error("root is not bracketed on [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
