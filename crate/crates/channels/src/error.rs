use qcap_linalg::LinalgError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("Kraus operator {index} has shape {found:?}, expected {expected:?}")]
    KrausShape {
        index: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("empty Kraus list")]
    NoKraus,
    #[error("Choi matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    ChoiNotPsd(f64),
    #[error("Stinespring operator is not an isometry (residual {0:.3e})")]
    NotIsometry(f64),
    #[error("unknown standard channel `{0}`")]
    UnknownStandard(String),
    #[error("parameter {param} out of range for `{name}`")]
    BadParam { name: String, param: f64 },
    #[error("input factors {0:?} not found in the state layout")]
    InputMismatch(Vec<String>),
}
