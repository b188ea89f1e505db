use thiserror::Error;

/// Errors raised by the library.
///
/// Variants are grouped by how a caller is expected to react: validation
/// problems are the caller's fault, resource errors mean a budget was too
/// small, and non-convergence carries enough diagnostics to decide whether
/// the best iterate is still usable.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} exceeds budget: requires {required}, allowed {allowed}")]
    Resource {
        what: String,
        required: u128,
        allowed: u128,
    },

    #[error("solver did not converge after {iterations} iterations (best value {best_value}, gap {gap})")]
    NonConvergence {
        iterations: usize,
        best_value: f64,
        gap: f64,
    },

    #[error("non-redundant condition violated at letter {letter} ({label})")]
    Redundant { letter: usize, label: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("inconsistent: {0}")]
    Inconsistent(String),

    #[error("code construction failed: {0}")]
    Construction(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, got })
        }
    }

    /// Short machine-readable category name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::DimensionMismatch { .. } => "validation",
            Error::Resource { .. } => "resource",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Redundant { .. } => "redundant",
            Error::Unsupported(_) => "unsupported",
            Error::Inconsistent(_) => "inconsistent",
            Error::Construction(_) => "construction",
            Error::Io(_) => "io",
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_)
            | Error::DimensionMismatch { .. }
            | Error::Redundant { .. }
            | Error::Unsupported(_)
            | Error::Io(_) => 2,
            Error::Resource { .. } => 3,
            Error::NonConvergence { .. } => 4,
            Error::Inconsistent(_) | Error::Construction(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
