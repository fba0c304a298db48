use crate::instance::{apply_on_first, averaged_state, RPDInstance};
use crate::{DecouplingError, Welford};
use qcap_entropies::{hmax_smooth, hmin_smooth};
use qcap_linalg::random::haar_unitary_with;
use qcap_linalg::{eye, kron, trace_norm_hermitian, CMat, DensityOperator, Normalization};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Outcome of a Monte-Carlo check of the direct bound.
#[derive(Debug, Clone, PartialEq)]
pub struct DecouplingReport {
    pub mean_delta: f64,
    pub std_error: f64,
    /// `theta_I + theta_II + 4 (eps + mu + eps mu)`.
    pub bound_rhs: f64,
    pub n_samples: usize,
    /// `(H_I, H_II)`; `-inf` marks a branch where the exponent is unused.
    pub exponents: (f64, f64),
}

impl DecouplingReport {
    /// `mean - 3 stderr <= bound`.
    pub fn passed(&self) -> bool {
        self.mean_delta - 3.0 * self.std_error <= self.bound_rhs
    }
}

/// Random stream `stream` of `seed`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `G_s U` on `A` with `U = direct sum of Haar U_j` and `s` a uniform
/// permutation (Fisher-Yates).
pub fn random_block_unitary<R: Rng + ?Sized>(j: usize, r: usize, rng: &mut R) -> CMat {
    let blocks: Vec<CMat> = (0..j).map(|_| haar_unitary_with(r, rng)).collect();
    let mut s: Vec<usize> = (0..j).collect();
    s.shuffle(rng);
    let mut v = CMat::zeros(j * r, j * r);
    for (k, u) in blocks.iter().enumerate() {
        v.view_mut((s[k] * r, k * r), (r, r)).copy_from(u);
    }
    v
}

/// One sample of the decoupling error for a fixed unitary `v = G_s U`,
/// together with `||U Psi U^dag - Psi_av||_1` (the same difference before
/// `T` and `G_s`).
pub fn delta_for_unitary(inst: &RPDInstance, v: &CMat, psi_av: &CMat) -> (f64, f64) {
    let d_r = inst.psi().dim() / v.nrows();
    let big = kron(v, &eye(d_r));
    let psi = inst.psi().matrix();
    let rotated = &big * psi * big.adjoint();
    let av_rot = &big * psi_av * big.adjoint();
    let diff = rotated - av_rot;
    // Psi_av is invariant under U, so diff is G_s (U Psi U^dag - Psi_av) G_s^dag.
    let before = trace_norm_hermitian(&diff);
    (trace_norm_hermitian(&apply_on_first(&inst.map_t().kraus(), &diff)), before)
}

/// `Delta_{s,U}` for one `(s, U)` drawn from `seed`.
pub fn sample_delta(inst: &RPDInstance, seed: u64) -> f64 {
    let av = averaged_state(inst);
    sample_delta_with_reference(inst, seed, 0, av.matrix()).0
}

/// Sample number `stream` of `seed`, reusing a precomputed `Psi_av`.
/// Returns `(Delta, ||U Psi U^dag - Psi_av||_1)`.
pub fn sample_delta_with_reference(inst: &RPDInstance, seed: u64, stream: u64, psi_av: &CMat) -> (f64, f64) {
    let mut rng = stream_rng(seed, stream);
    let v = random_block_unitary(inst.j(), inst.r(), &mut rng);
    delta_for_unitary(inst, &v, psi_av)
}

/// The right-hand side of the direct bound and the exponents `(H_I, H_II)`.
pub fn direct_bound_rhs(inst: &RPDInstance) -> Result<(f64, f64, f64), DecouplingError> {
    let (eps, mu) = (inst.epsilon, inst.mu);
    let psi = inst.expanded_psi();
    let tau = inst.tau();
    let c_tau = DensityOperator::from_parts_unchecked(
        inst.dephase_ac(tau.matrix()),
        tau.layout().clone(),
        Normalization::Normalized,
    );
    let j = inst.j();
    let h_i = if j >= 2 {
        let hmin = hmin_smooth(&psi, &["Ac", "Ar"], &["Rc", "Rr"], eps)?.value;
        let hmax = hmax_smooth(&c_tau, &["Ac", "Ar"], &["C"], mu)?.value;
        ((j - 1) as f64).log2() + hmin - hmax
    } else {
        f64::NEG_INFINITY
    };
    let h_ii = if inst.r() >= 2 {
        let c_psi = DensityOperator::from_parts_unchecked(
            inst.dephase_ac(psi.matrix()),
            psi.layout().clone(),
            Normalization::Normalized,
        );
        let hmin = hmin_smooth(&c_psi, &["Ac", "Ar"], &["Rc", "Rr"], eps)?.value;
        let hmax = hmax_smooth(&c_tau, &["Ar"], &["C", "Ac"], mu)?.value;
        hmin - hmax
    } else {
        f64::NEG_INFINITY
    };
    let theta = |h: f64| if h == f64::NEG_INFINITY { 0.0 } else { (-0.5 * h).exp2() };
    let bound = theta(h_i) + theta(h_ii) + 4.0 * (eps + mu + eps * mu);
    Ok((bound, h_i, h_ii))
}

/// Mean and standard error of `Delta_{s,U}` over `n_samples` draws (sample
/// `i` uses stream `i` of `seed`), compared with the entropic bound.
pub fn verify_direct_theorem(
    inst: &RPDInstance,
    n_samples: usize,
    seed: u64,
) -> Result<DecouplingReport, DecouplingError> {
    let (bound_rhs, h_i, h_ii) = direct_bound_rhs(inst)?;
    let av = averaged_state(inst);
    let samples: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| sample_delta_with_reference(inst, seed, i, av.matrix()).0)
        .collect();
    let w: Welford = samples.into_iter().collect();
    Ok(DecouplingReport {
        mean_delta: w.mean,
        std_error: w.std_error(),
        bound_rhs,
        n_samples,
        exponents: (h_i, h_ii),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{partial_trace_map, random_coherent_state};
    use qcap_channels::{standard_channel, StandardChannel};
    use qcap_linalg::max_abs;

    #[test]
    fn block_unitary_is_unitary_and_block_structured() {
        let mut rng = stream_rng(1, 0);
        let v = random_block_unitary(3, 2, &mut rng);
        assert!(max_abs(&(v.adjoint() * &v - eye(6))) < 1e-12);
        for col_block in 0..3 {
            let nonzero: Vec<usize> = (0..3)
                .filter(|&rb| max_abs(&v.view((rb * 2, col_block * 2), (2, 2)).into_owned()) > 1e-14)
                .collect();
            assert_eq!(nonzero.len(), 1);
        }
    }

    #[test]
    fn depolarized_output_never_decouples_badly() {
        let mut rng = stream_rng(2, 0);
        let psi = random_coherent_state(2, 2, 2, 1, &mut rng);
        let dep = standard_channel(StandardChannel::Depolarizing, 1.0).unwrap();
        let dep_kraus = dep.kraus();
        let t = qcap_channels::ChannelRep::kraus_ab(
            partial_trace_map(2, 2, true)
                .kraus()
                .iter()
                .flat_map(|k| dep_kraus.iter().map(move |d| d * k))
                .collect(),
        )
        .unwrap();
        let inst = RPDInstance::new(&psi, 2, 2, &t, 0.0, 0.0).unwrap();
        for seed in 0..5 {
            assert!(sample_delta(&inst, seed) < 1e-12);
        }
    }

    #[test]
    fn dimension_one_branches_drop_their_theta() {
        let mut rng = stream_rng(3, 0);
        let psi = random_coherent_state(1, 2, 2, 1, &mut rng);
        let t = partial_trace_map(1, 2, false);
        let inst = RPDInstance::new(&psi, 1, 2, &t, 0.0, 0.0).unwrap();
        let (_, h_i, h_ii) = direct_bound_rhs(&inst).unwrap();
        assert_eq!(h_i, f64::NEG_INFINITY);
        assert!(h_ii.is_finite());

        let psi = random_coherent_state(2, 1, 1, 1, &mut rng);
        let t = partial_trace_map(2, 1, true);
        let inst = RPDInstance::new(&psi, 2, 1, &t, 0.0, 0.0).unwrap();
        let (_, h_i, h_ii) = direct_bound_rhs(&inst).unwrap();
        assert!(h_i.is_finite());
        assert_eq!(h_ii, f64::NEG_INFINITY);
    }
}
