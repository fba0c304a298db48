use qcap_channels::ChannelError;
use qcap_entropies::EntropyError;
use qcap_linalg::LinalgError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecouplingError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error("state is not classically coherent (residual {0:.3e})")]
    NotCoherent(f64),
    #[error("bad instance: {0}")]
    Instance(String),
    #[error("hypothesis violated: distance {distance:.6e} exceeds delta {delta:.6e}")]
    Hypothesis { distance: f64, delta: f64 },
    #[error("source marginal is not maximally mixed (deviation {0:.3e})")]
    SourceNotMixed(f64),
    #[error("code ({c},{q},{e}) does not embed into d_Sc = {d_c}, d_Sr = {d_r}")]
    Embedding {
        c: u32,
        q: u32,
        e: u32,
        d_c: usize,
        d_r: usize,
    },
}
