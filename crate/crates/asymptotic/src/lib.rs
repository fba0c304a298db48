//! Asymptotic rate regions for simultaneous classical and quantum
//! transmission with entanglement: the polytopes built from von Neumann
//! quantities of a source ensemble, the closed-form vertices of the
//! entanglement-consuming region, unions over ensembles, and method-of-types
//! helpers.

mod error;
mod hull;
mod polytope;
mod types;
mod vertices;

pub use error::AsymptoticError;
pub use hull::convex_hull;
pub use polytope::{lambda_region, region_union, tensor_square, theta_region, EntropyProfile, AXES};
pub use qcap_bounds::{HalfSpace, InputEnsemble, RateRegion};
pub use types::{
    enumerate_types, state_type_projectors, type_class_size, type_of, type_projector, TypeDistribution,
};
pub use vertices::{all_points, lambda_vertices, LabeledVertex, LambdaVertices, DEGENERACY_TOL};
