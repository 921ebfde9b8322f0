use std::fmt;

/// Error type shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A value failed a structural requirement (NaN, wrong shape, ...).
    InvalidValue(String),
    /// `-inf + inf` was requested.
    IndeterminateSum,
    /// An input violated a documented precondition.
    Precondition(String),
    /// An integral certified as divergent (e.g. the shift left the
    /// gradient image of the weight).
    Divergent(String),
    /// Quadrature failed to reach its tolerance.
    QuadratureFailure(String),
    /// A linear solve met an ill-conditioned matrix; payload is the
    /// estimated condition number.
    IllConditioned(f64),
    /// An asymptotic slope had not converged across its two windows.
    SlopeNotConverged { estimate: f64, window_gap: f64 },
    /// Parsing or I/O problem, with the offending location.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidValue(msg) => write!(f, "invalid value: {msg}"),
            Error::IndeterminateSum => write!(f, "indeterminate sum -inf + inf"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::Divergent(msg) => write!(f, "divergent integral: {msg}"),
            Error::QuadratureFailure(msg) => write!(f, "quadrature failure: {msg}"),
            Error::IllConditioned(cond) => {
                write!(f, "ill-conditioned matrix (condition number ~{cond:.3e})")
            }
            Error::SlopeNotConverged {
                estimate,
                window_gap,
            } => write!(
                f,
                "slope estimate {estimate} not converged (window gap {window_gap:.3e})"
            ),
            Error::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(format!("json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
