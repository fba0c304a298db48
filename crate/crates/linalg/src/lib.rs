//! Dense complex linear algebra on labeled multipartite spaces.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Every operator carries a
//! [`SystemLayout`] naming its tensor factors; factor order is significant
//! and reordering only happens through [`permute`].

mod error;
mod layout;
pub mod lemmas;
mod matfn;
mod ops;
pub mod random;
mod state;
mod tol;

pub use error::LinalgError;
pub use layout::{ClassicalSplit, Factor, SystemLayout};
pub use matfn::{
    apply_fn, eigh, hermitian_part, is_hermitian, kron, kron_all, max_abs, min_eigenvalue, psd_sqrt,
    trace_norm, trace_norm_hermitian,
};
pub use ops::{
    dephase, dephase_matrix, fidelity_matrix, generalized_fidelity, generalized_fidelity_matrix,
    partial_trace, partial_trace_matrix, permute, permute_matrix, permute_vector,
    purified_distance, purified_distance_matrix, purify, purify_matrix, purify_with_label, tensor,
    trace_distance,
};
pub use random::haar_unitary;
pub use state::{DensityOperator, Normalization, PureState};
pub use tol::Tolerances;

pub use num_complex::Complex64;

/// Complex dense matrix.
pub type CMat = nalgebra::DMatrix<Complex64>;
/// Complex dense column vector.
pub type CVec = nalgebra::DVector<Complex64>;

/// Shorthand for a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real part of the trace.
pub fn trace_re(m: &CMat) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).sum()
}

/// `|v><v|`.
pub fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Identity matrix of dimension `d`.
pub fn eye(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Computational basis vector `|i>` in dimension `d`.
pub fn ket(d: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(d);
    v[i] = c64(1.0, 0.0);
    v
}

/// Normalized maximally entangled vector `(1/sqrt d) sum_i |i>|i>`.
pub fn max_entangled(d: usize) -> CVec {
    let mut v = CVec::zeros(d * d);
    let a = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = c64(a, 0.0);
    }
    v
}

/// Base-2 logarithm with `log 0 = -inf`.
#[inline]
pub fn log2(x: f64) -> f64 {
    x.log2()
}
