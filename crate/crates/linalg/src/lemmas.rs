//! Constructions for two trace-distance lemmas on classical-quantum states:
//! a composition bound for block states, and coherent purifications of
//! classically correlated ensembles.

use crate::{c64, kron, ket, outer, psd_sqrt, trace_norm_hermitian, CMat, CVec};

/// `rho = (1/K) sum_k |k><k|_X x |k><k|_Y x rho_k` and
/// `sigma = (1/K) sum_k |k><k|_X x sum_k' p(k'|k) |k'><k'|_Y x sigma_kk'`.
#[derive(Debug, Clone)]
pub struct BlockPair {
    pub rho_k: Vec<CMat>,
    /// `p[k][k']` is a conditional distribution for each `k`.
    pub p: Vec<Vec<f64>>,
    pub sigma: Vec<Vec<CMat>>,
}

impl BlockPair {
    pub fn k(&self) -> usize {
        self.rho_k.len()
    }

    pub fn rho(&self) -> CMat {
        let k = self.k();
        let mut out = CMat::zeros(k * k * self.rho_k[0].nrows(), k * k * self.rho_k[0].nrows());
        for i in 0..k {
            let x = outer(&ket(k, i));
            out += kron(&kron(&x, &x), &self.rho_k[i]);
        }
        out.unscale(k as f64)
    }

    pub fn sigma(&self) -> CMat {
        let k = self.k();
        let d = self.rho_k[0].nrows();
        let mut out = CMat::zeros(k * k * d, k * k * d);
        for i in 0..k {
            let x = outer(&ket(k, i));
            for j in 0..k {
                let y = outer(&ket(k, j));
                out += kron(&kron(&x, &y), &self.sigma[i][j]).scale(self.p[i][j]);
            }
        }
        out.unscale(k as f64)
    }

    /// `(1/K) sum_k (1 - p(k|k))`.
    pub fn miss_probability(&self) -> f64 {
        let k = self.k();
        (0..k).map(|i| 1.0 - self.p[i][i]).sum::<f64>() / k as f64
    }

    /// `(1/K) sum_k || rho_k - sum_k' p(k'|k) sigma_kk' ||_1`.
    pub fn block_error(&self) -> f64 {
        let k = self.k();
        let mut s = 0.0;
        for i in 0..k {
            let mut mix = CMat::zeros(self.rho_k[i].nrows(), self.rho_k[i].ncols());
            for j in 0..k {
                mix += self.sigma[i][j].scale(self.p[i][j]);
            }
            s += trace_norm_hermitian(&(&self.rho_k[i] - mix));
        }
        s / k as f64
    }

    /// Smallest `delta` for which both hypotheses `<= delta/3` hold.
    pub fn delta(&self) -> f64 {
        3.0 * self.miss_probability().max(self.block_error())
    }

    pub fn distance(&self) -> f64 {
        trace_norm_hermitian(&(self.rho() - self.sigma()))
    }
}

/// `sum_k sqrt(p_k) |k>_X |k>_Y |v_k>` for vectors `v_k` on a common space.
pub fn coherent_state(p: &[f64], v: &[CVec]) -> CVec {
    let k = p.len();
    let d = v[0].len();
    let mut out = CVec::zeros(k * k * d);
    for i in 0..k {
        let off = (i * k + i) * d;
        for a in 0..d {
            out[off + a] = v[i][a] * c64(p[i].sqrt(), 0.0);
        }
    }
    out
}

/// The purification of `varrho` on `A x B` (as a `d_A x d_B` coefficient
/// matrix) with maximal overlap with `phi`. Needs `d_B >= d_A`.
///
/// Purifications of `varrho` are `N = sqrt(varrho) W` with `W W^dagger = I`;
/// the overlap `Tr(N^dagger M)` is maximized by the polar part of
/// `sqrt(varrho) M`.
pub fn best_purification(varrho: &CMat, phi: &CVec, d_b: usize) -> CVec {
    let d_a = varrho.nrows();
    assert!(d_b >= d_a, "reference must be at least as large as the system");
    let m = CMat::from_fn(d_a, d_b, |a, b| phi[a * d_b + b]);
    let s = psd_sqrt(varrho);
    let x = &s * &m;
    let svd = x.svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    // Thin SVD of a d_A x d_B matrix with d_A <= d_B: u is unitary and vt
    // has orthonormal rows, so W W^dagger = I even when x is rank deficient.
    let w = &u * &vt;
    let n = &s * w;
    CVec::from_fn(d_a * d_b, |i, _| n[(i / d_b, i % d_b)])
}

/// The coherent purification `sum_k sqrt(p_k)|k>_X|k>_Y|psi*_k>_AB` of
/// `rho = sum_k p_k |k><k| x varrho_k` that best matches `phi` blockwise.
pub fn coherent_purification(p: &[f64], varrho: &[CMat], phi_k: &[CVec], d_b: usize) -> CVec {
    let best: Vec<CVec> = varrho
        .iter()
        .zip(phi_k)
        .map(|(r, f)| best_purification(r, f, d_b))
        .collect();
    coherent_state(p, &best)
}

/// `|| |a><a| - |b><b| ||_1` for unit vectors.
pub fn pure_trace_distance(a: &CVec, b: &CVec) -> f64 {
    let ov = a.dotc(b).norm_sqr();
    2.0 * (1.0 - ov).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::max_abs;

    #[test]
    fn best_purification_reproduces_marginal() {
        let varrho = CMat::from_row_slice(
            2,
            2,
            &[c64(0.6, 0.0), c64(0.1, 0.1), c64(0.1, -0.1), c64(0.4, 0.0)],
        );
        let mut phi = CVec::zeros(4);
        phi[0] = c64(1.0, 0.0);
        let psi = best_purification(&varrho, &phi, 2);
        let n = CMat::from_fn(2, 2, |a, b| psi[a * 2 + b]);
        assert!(max_abs(&(&n * n.adjoint() - &varrho)) < 1e-12);
    }
}
