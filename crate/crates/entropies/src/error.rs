use qcap_linalg::LinalgError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("smoothing parameter {0} outside [0, 1)")]
    BadEpsilon(f64),
    #[error("state has zero trace")]
    ZeroState,
    #[error("labels {0:?} appear in both subsystems")]
    Overlap(Vec<String>),
}
