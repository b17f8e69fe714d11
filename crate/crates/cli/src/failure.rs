use std::fmt;

use dacspec_core::Error;

/// Stable process exit codes.
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_FIT: u8 = 3;
pub const EXIT_RANGE: u8 = 4;
pub const EXIT_CALIBRATION: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    /// Wraps a library error with a context prefix, keeping its exit code.
    pub fn context(context: impl fmt::Display, err: Error) -> Self {
        let code = exit_code(&err);
        Self {
            code,
            message: format!("{context}: {err}"),
        }
    }

    /// Like [`Failure::context`], but calibration construction errors map to
    /// the calibration exit code.
    pub fn calibration(context: impl fmt::Display, err: Error) -> Self {
        let code = match err {
            Error::NonMonotone { .. }
            | Error::DuplicatePressure(_)
            | Error::TooFewPoints { .. } => EXIT_CALIBRATION,
            ref other => exit_code(other),
        };
        Self {
            code,
            message: format!("{context}: {err}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Self {
            code: exit_code(&err),
            message: err.to_string(),
        }
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NoPeak(_) | Error::Singular(_) | Error::NotConverged { .. } => EXIT_FIT,
        Error::OutOfRange(_) | Error::ExtrapolationRefused { .. } | Error::NotBracketed { .. } => {
            EXIT_RANGE
        }
        Error::NonMonotone { .. } | Error::DuplicatePressure(_) => EXIT_CALIBRATION,
        _ => EXIT_INPUT,
    }
}
