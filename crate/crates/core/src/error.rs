use std::fmt;

/// Errors produced anywhere in the evaluation pipeline.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by a ball that may contain zero")]
    DivisionByPossibleZero,

    #[error("the cusp form space of weight {weight} and level 1 is zero-dimensional")]
    EmptySpace { weight: u32 },

    #[error("expansion length {available} is too short, need at least {needed}")]
    InsufficientLength { needed: usize, available: usize },

    #[error("no Hecke operator among the first {tried} primes has a squarefree characteristic polynomial")]
    NonSquarefreeCharPoly { tried: usize },

    #[error("embedding {embedding} out of range for a space with {count} eigenforms")]
    EmbeddingOutOfRange { embedding: usize, count: usize },

    #[error("accuracy target must be positive")]
    NonPositiveAccuracy,

    #[error("evaluation point must lie in the upper half plane")]
    NonPositiveImaginaryPart,

    #[error("point reduction could not decide a branch; retry at higher precision")]
    UncertainRegion,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(Stage),

    #[error("level {0} is not supported without user-supplied coefficients")]
    UnsupportedLevel(u64),

    #[error("the Atkin-Lehner sign could not be determined")]
    IndeterminateSign,

    #[error("evaluation point too close to a zero of f; choose another z0")]
    ProbablyZero,

    #[error("{0} is not prime")]
    CompositeIndex(u64),

    #[error("{needed} coefficients required but only {available} available")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Which stage ran out of precision retries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Evaluation,
    HeckeSum,
    Quotient,
    Eigenvector,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Evaluation => "form evaluation",
            Stage::HeckeSum => "Hecke operator sum",
            Stage::Quotient => "eigenvalue quotient",
            Stage::Eigenvector => "eigenvector extraction",
        };
        f.write_str(s)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
