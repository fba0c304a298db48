//! Conditional min- and max-entropies, their smoothed versions, and von
//! Neumann quantities. All values are in bits.
//!
//! Smooth entropies are computed by semidefinite programming with the
//! interior point solver in [`sdp`]. The smoothing ball is taken in purified
//! distance over subnormalized states.

mod error;
mod minmax;
pub mod sdp;
mod vn;

pub use error::EntropyError;
pub use minmax::{
    bipartite, hmax, hmax_direct, hmax_smooth, hmax_smooth_with, hmax_with, hmin, hmin_fixed,
    hmin_smooth, hmin_smooth_with, hmin_with, Achiever, SmoothEntropyResult,
};
pub use sdp::{SolveStatus, SolverSettings};
pub use vn::{
    cond_mutual_info, entropy_matrix, mutual_info, von_neumann, von_neumann_cond,
};
