use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants split into two classes: input/validation failures and numerical
/// failures. The CLI maps them onto distinct exit codes via
/// [`Error::is_numerical`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("normalization impossible: {0}")]
    NormalizationImpossible(String),
    #[error("unsupported link: {0}")]
    UnsupportedLink(String),
    #[error("ordering error: {0}")]
    Ordering(String),
    #[error("complex indicial root at mode {mode} (discriminant {discriminant:e})")]
    ComplexIndicialRoot { mode: usize, discriminant: f64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("functional appears unbounded below: {0}")]
    UnboundedBelow(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical procedure on valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::IllConditioned(_)
                | Error::ComplexIndicialRoot { .. }
                | Error::NonConvergence { .. }
                | Error::UnboundedBelow(_)
        )
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
