//! Error taxonomy shared across the crate.
//!
//! The CLI maps these onto process exit codes: validation/domain errors
//! exit 2, numerical contract violations exit 3, I/O failures exit 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter was outside its mathematical domain (e.g. `Im z <= 0`,
    /// `sigma2 <= 0`, Student-t degrees of freedom `<= 2`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix had the wrong shape for the requested operation.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An input violated a numerical precondition contract
    /// (non-Hermitian input to the eigensolver, non-Type-III input to the
    /// inverse structure check, eigensolver residual breach).
    #[error("numerical contract violation: {0}")]
    Contract(String),

    /// The matrix was singular or too ill-conditioned to invert reliably.
    #[error("invertibility error: {0}")]
    Singular(String),

    /// Experiment configuration failed validation; lists offending fields.
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Dimension(_) | Error::Validation(_) => 2,
            Error::Contract(_) | Error::Singular(_) => 3,
            Error::Io { .. } => 4,
        }
    }
}
