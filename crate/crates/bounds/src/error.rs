use qcap_channels::ChannelError;
use qcap_entropies::EntropyError;
use qcap_linalg::LinalgError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error("entropy solver did not converge for {0}")]
    Solver(String),
    #[error("ensemble is not block diagonal in S_c (residual {0:.3e})")]
    NotBlockDiagonal(f64),
    #[error("source marginal is not maximally mixed (deviation {0:.3e})")]
    SourceNotMixed(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
}
