use std::fmt;

use heckeval::Error;

/// Everything the command line can fail with.
#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Parse(String),
    NotNormalized(String),
    Network(String),
    NotFound(String),
    Io(std::io::Error),
    Config(String),
    /// A value was produced but its radius misses the requested accuracy.
    Inaccurate { radius: String, digits: u32 },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// Process exit status for this error.
    ///
    /// | code | meaning |
    /// |------|---------|
    /// | 2 | bad configuration or flags |
    /// | 3 | the request is mathematically invalid or unsupported |
    /// | 4 | the evaluation point is too close to a zero of `f` |
    /// | 5 | the numerics failed to certify a result |
    /// | 6 | unreadable or malformed coefficient data |
    /// | 7 | remote fetch failed |
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                Error::ProbablyZero => 4,
                Error::CompositeIndex(_)
                | Error::UnsupportedLevel(_)
                | Error::EmptySpace { .. }
                | Error::EmbeddingOutOfRange { .. }
                | Error::NonPositiveAccuracy
                | Error::NonPositiveImaginaryPart
                | Error::InvalidInput(_) => 3,
                Error::InsufficientCoefficients { .. } | Error::InsufficientLength { .. } => 6,
                Error::DivisionByPossibleZero
                | Error::NonSquarefreeCharPoly { .. }
                | Error::UncertainRegion
                | Error::PrecisionExhausted(_)
                | Error::IndeterminateSign => 5,
            },
            CliError::Inaccurate { .. } => 5,
            CliError::Parse(_) | CliError::NotNormalized(_) | CliError::Io(_) => 6,
            CliError::Network(_) | CliError::NotFound(_) => 7,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(Error::ProbablyZero) => {
                f.write_str("evaluation point too close to a zero of f; choose another --z0")
            }
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::NotNormalized(a1) => write!(f, "eigenform is not normalized: a_1 = {a1}"),
            CliError::Network(m) => write!(f, "network error: {m}"),
            CliError::NotFound(m) => write!(f, "not found: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Inaccurate { radius, digits } => {
                write!(f, "radius {radius} does not reach 10^-{digits}")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probably_zero_message_names_the_flag() {
        let e = CliError::from(Error::ProbablyZero);
        assert_eq!(e.to_string(), "evaluation point too close to a zero of f; choose another --z0");
        assert_eq!(e.exit_code(), 4);
    }

    #[test]
    fn distinct_codes() {
        assert_eq!(CliError::from(Error::CompositeIndex(4)).exit_code(), 3);
        assert_eq!(CliError::NotNormalized("2".into()).exit_code(), 6);
        assert_eq!(CliError::NotFound("x".into()).exit_code(), 7);
    }
}
