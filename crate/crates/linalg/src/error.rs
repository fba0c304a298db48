use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("duplicate factor label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown factor label `{0}`")]
    UnknownLabel(String),
    #[error("factor `{0}` has zero dimension")]
    ZeroDim(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("classical split of `{label}` needs dim {expected}, factor has {found}")]
    BadSplit {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("trace {0:.12} out of range for the requested normalization")]
    BadTrace(f64),
    #[error("vector norm {0:.12} is not 1")]
    BadNorm(f64),
    #[error("operation requires a normalized state")]
    NeedsNormalized,
    #[error("{0}")]
    Invalid(String),
}
