//! One-shot capacity conditions for simultaneous classical and quantum
//! transmission with limited entanglement: the direct and converse coding
//! conditions, their entanglement-assisted versions, capacity estimates and
//! inner/outer rate regions.

mod capacity;
mod ensemble;
mod error;
mod nelder_mead;
mod oneshot;
pub mod region;

pub use capacity::{
    capacity_estimate, delta_prime_grid, lower_expression, simultaneous_region, table_epsilon,
    upper_expression, CapacityEstimate, RegionGrid, Scenario, SearchConfig, SimultaneousRegion,
};
pub use ensemble::{FamilyPoint, InputEnsemble};
pub use error::BoundsError;
pub use oneshot::{
    best_direct_budget, capacity_lambda, capacity_lambda_prime, converse_holds, direct_error,
    direct_feasible, unlimited_converse, unlimited_direct, ConverseReport, DirectReport, SmoothingBudget,
    UnlimitedReport, FEAS_TOL,
};
pub use qcap_decoupling::CodeParams;
pub use region::{HalfSpace, RateRegion};
