use thiserror::Error;

/// Errors raised by the geometry, quadrature and checking routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive refinement hit its depth cap before reaching the tolerance.
    #[error("accuracy error: estimate {estimate} with error bound {error_bound} exceeds tolerance {tol}")]
    Accuracy {
        estimate: f64,
        error_bound: f64,
        tol: f64,
    },

    /// The integrand does not decay the way the caller asserted.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A geometric configuration does not determine the requested object.
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    /// Two inputs that must differ coincide.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A root could not be bracketed or a solver stalled.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// ODE integration failed before reaching its stopping condition.
    #[error("integration error: {0}")]
    Integration(String),

    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),

    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
