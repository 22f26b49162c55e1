use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of a function.
    Domain {
        what: &'static str,
        value: f64,
    },
    /// A parameter set violated one of its invariants.
    InvalidParameter(&'static str),
    /// The Fock truncation lost more trace than the budget allows.
    Truncation {
        cutoff: usize,
        deficit: f64,
    },
    DimensionMismatch {
        left: usize,
        right: usize,
    },
    /// An adaptive ladder (cutoff, quadrature) gave up.
    NonConvergence(&'static str),
    EmptyInput(&'static str),
}

impl Error {
    /// True for failures that come from numerics rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Truncation { .. } | Error::NonConvergence(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what}: argument {value} outside domain"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Truncation { cutoff, deficit } => write!(
                f,
                "Fock cutoff {cutoff} too small: trace deficit {deficit:e} exceeds budget"
            ),
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::NonConvergence(what) => write!(f, "did not converge: {what}"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
        }
    }
}
