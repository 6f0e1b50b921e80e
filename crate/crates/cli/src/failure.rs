use std::fmt;

use spherekern::Error;

pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNSUPPORTED_DIMENSION: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;
pub const EXIT_NO_WITNESS_EXPECTED: i32 = 5;
pub const EXIT_SEARCH_EXHAUSTED: i32 = 6;

/// An error message paired with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }

    pub fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::UnsupportedDimension(_) | Error::RequiresFiniteDimension => {
                EXIT_UNSUPPORTED_DIMENSION
            }
            Error::DimensionMismatch { .. } | Error::LengthMismatch { .. } => EXIT_MISMATCH,
            Error::SearchExhausted { .. } => EXIT_SEARCH_EXHAUSTED,
            Error::Domain { .. }
            | Error::InvalidScheme(_)
            | Error::InvalidPoints(_)
            | Error::MaskInconsistent(_)
            | Error::MissingTailBound(_) => EXIT_PARSE,
            Error::RequiresSparse
            | Error::PreconditionFailed(_)
            | Error::QuadratureNoConvergence { .. } => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
