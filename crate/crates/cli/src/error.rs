use qcap_asymptotic::AsymptoticError;
use qcap_bounds::BoundsError;
use qcap_channels::ChannelError;
use qcap_decoupling::DecouplingError;
use qcap_entropies::EntropyError;
use qcap_linalg::LinalgError;
use thiserror::Error;

/// Failure of a command, carrying its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EntropyError> for CliError {
    fn from(e: EntropyError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Solver(_) => CliError::Solver(e.to_string()),
            BoundsError::Entropy(e) => e.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<DecouplingError> for CliError {
    fn from(e: DecouplingError) -> Self {
        match e {
            DecouplingError::Entropy(e) => e.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<AsymptoticError> for CliError {
    fn from(e: AsymptoticError) -> Self {
        match e {
            AsymptoticError::Bounds(e) => e.into(),
            AsymptoticError::Entropy(e) => e.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}
