use qcap_bounds::BoundsError;
use qcap_channels::ChannelError;
use qcap_entropies::EntropyError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticError {
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error("{0} copies requested; at most 2 are supported")]
    TooManyCopies(usize),
    #[error("invalid type: {0}")]
    Type(String),
}
