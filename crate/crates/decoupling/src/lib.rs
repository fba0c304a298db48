//! Randomized partial decoupling: closed-form averaging, Monte-Carlo
//! estimates of the decoupling error, the entropic bounds of the direct and
//! converse theorems, and the encoder identity behind channel coding.
//!
//! A bipartite state `Psi` on `A x R` uses `A = A_c x A_r` with index
//! `k * r + alpha` and `R = R_c x R_r` with index `k * r_R + beta`.

mod converse;
mod direct;
mod encoder;
mod error;
mod instance;
mod stats;

pub use converse::{
    check_converse_theorem, lambda, lambda_prime, product_omega, ConverseReport, Verdict,
};
pub use direct::{
    delta_for_unitary, direct_bound_rhs, random_block_unitary, sample_delta, sample_delta_with_reference, verify_direct_theorem,
    DecouplingReport,
};
pub use encoder::{build_psi_rho, random_source, verify_encoder_identity, CodeParams, EncoderResidual};
pub use error::DecouplingError;
pub use instance::{
    averaged_state, coherence_residual, partial_trace_map, random_coherent_state, RPDInstance,
};
pub use stats::Welford;
