//! Random matrices and states.

use crate::{c64, CMat, CVec, Complex64};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Matrix with i.i.d. standard complex Gaussian entries (variance 1 per entry).
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re * s, im * s)
    })
}

/// Haar-distributed unitary from a seed.
pub fn haar_unitary(dim: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary_with(dim, &mut rng)
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
/// diagonal of R moved into Q.
pub fn haar_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMat {
    let g = ginibre(dim, dim, rng);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = DVector::from_fn(dim, |i, _| {
        let z = r[(i, i)];
        let n = z.norm();
        if n > 0.0 {
            z / n
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    let mut u = q;
    for (j, mut col) in u.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    u
}

/// Random unit vector (uniform on the sphere).
pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVec {
    let g = ginibre(dim, 1, rng);
    let v: CVec = g.column(0).into_owned();
    let n = v.norm();
    v.unscale(n)
}

/// Random density matrix `G G^dagger / Tr` with `G` of shape `dim x rank`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CMat {
    let g = ginibre(dim, rank.max(1), rng);
    let m = &g * g.adjoint();
    let t = crate::trace_re(&m);
    m.unscale(t)
}

/// Uniformly random permutation of `0..n` (Fisher-Yates).
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
