use crate::DecouplingError;
use qcap_channels::ChannelRep;
use qcap_linalg::random::random_pure;
use qcap_linalg::{c64, dephase_matrix, eye, kron, CMat, DensityOperator, Normalization, SystemLayout};
use rand::Rng;

const COHERENCE_TOL: f64 = 1e-10;

/// A classically coherent state on `A x R` together with the map `T: A -> E`.
#[derive(Debug, Clone)]
pub struct RPDInstance {
    psi: DensityOperator,
    j: usize,
    r: usize,
    r_r: usize,
    map_t: ChannelRep,
    pub epsilon: f64,
    pub mu: f64,
}

/// Largest entry of `psi` outside the classically coherent pattern, i.e.
/// with the `A_c` and `R_c` labels differing on the row or column side.
pub fn coherence_residual(psi: &CMat, j: usize, r: usize, r_r: usize) -> f64 {
    let d_r = j * r_r;
    let n = psi.nrows();
    let label = |idx: usize| {
        let (a, rr) = (idx / d_r, idx % d_r);
        (a / r, rr / r_r)
    };
    let mut worst: f64 = 0.0;
    for row in 0..n {
        let (ka, kr) = label(row);
        for col in 0..n {
            let (la, lr) = label(col);
            if ka != kr || la != lr {
                worst = worst.max(psi[(row, col)].norm());
            }
        }
    }
    worst
}

impl RPDInstance {
    /// `psi` lives on `A x R` (first factor `A` of dimension `j * r`, the
    /// rest `R` of dimension `j * r_r`); `map_t` acts on `A`.
    pub fn new(
        psi: &DensityOperator,
        j: usize,
        r: usize,
        map_t: &ChannelRep,
        epsilon: f64,
        mu: f64,
    ) -> Result<Self, DecouplingError> {
        let d_a = j * r;
        if j == 0 || r == 0 || psi.dim() % d_a != 0 || (psi.dim() / d_a) % j != 0 {
            return Err(DecouplingError::Instance(format!(
                "state dimension {} is incompatible with J = {j}, r = {r}",
                psi.dim()
            )));
        }
        if psi.normalization() != Normalization::Normalized {
            return Err(DecouplingError::Instance("state must be normalized".into()));
        }
        if map_t.d_in() != d_a {
            return Err(DecouplingError::Instance(format!(
                "map input dimension {} differs from dim A = {d_a}",
                map_t.d_in()
            )));
        }
        if !(0.0..1.0).contains(&epsilon) || !(0.0..1.0).contains(&mu) {
            return Err(DecouplingError::Instance("smoothing parameters must lie in [0, 1)".into()));
        }
        let r_r = psi.dim() / d_a / j;
        let res = coherence_residual(psi.matrix(), j, r, r_r);
        if res >= COHERENCE_TOL {
            return Err(DecouplingError::NotCoherent(res));
        }
        let layout = SystemLayout::new(vec![("A", d_a), ("R", j * r_r)])?.with_split("A", j, r)?;
        let psi = DensityOperator::new(psi.matrix().clone(), layout, Normalization::Normalized)?;
        let map_t = map_t.relabel(
            SystemLayout::single("A", d_a),
            SystemLayout::single("E", map_t.d_out()),
        )?;
        Ok(Self {
            psi,
            j,
            r,
            r_r,
            map_t,
            epsilon,
            mu,
        })
    }

    pub fn psi(&self) -> &DensityOperator {
        &self.psi
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Dimension of `R_r`.
    pub fn r_ref(&self) -> usize {
        self.r_r
    }

    pub fn map_t(&self) -> &ChannelRep {
        &self.map_t
    }

    /// `psi` on `Ac x Ar x Rc x Rr`.
    pub fn expanded_psi(&self) -> DensityOperator {
        DensityOperator::from_parts_unchecked(
            self.psi.matrix().clone(),
            SystemLayout::new(vec![("Ac", self.j), ("Ar", self.r), ("Rc", self.j), ("Rr", self.r_r)])
                .expect("distinct labels"),
            Normalization::Normalized,
        )
    }

    /// Choi state of the complementary map of `T`, on `Ac x Ar x C`.
    pub fn tau(&self) -> DensityOperator {
        let comp = self.map_t.complementary();
        let m = comp.choi_matrix();
        let d_c = comp.d_out();
        DensityOperator::from_parts_unchecked(
            m,
            SystemLayout::new(vec![("Ac", self.j), ("Ar", self.r), ("C", d_c)])
                .expect("distinct labels"),
            Normalization::Normalized,
        )
    }

    /// Completely dephasing `A_c` of an operator whose first two factors are
    /// `A_c x A_r`.
    pub(crate) fn dephase_ac(&self, m: &CMat) -> CMat {
        let rest = m.nrows() / (self.j * self.r);
        dephase_matrix(m, &[self.j, self.r, rest], 0)
    }
}

/// `(K x id)(X)` summed over the Kraus operators `K`, acting on the first
/// factor of `X`.
pub(crate) fn apply_on_first(kraus: &[CMat], x: &CMat) -> CMat {
    let id = eye(x.nrows() / kraus[0].ncols());
    let d = kraus[0].nrows() * id.nrows();
    kraus.iter().fold(CMat::zeros(d, d), |acc, k| {
        let big = kron(k, &id);
        acc + &big * x * big.adjoint()
    })
}

/// `Psi_av = sum_j |j><j| x pi_{A_r} x Psi_jj^R` in closed form.
pub fn averaged_state(inst: &RPDInstance) -> DensityOperator {
    let (j, r) = (inst.j, inst.r);
    let d_r = j * inst.r_r;
    let psi = inst.psi.matrix();
    let mut out = CMat::zeros(psi.nrows(), psi.ncols());
    for k in 0..j {
        let mut block = CMat::zeros(d_r, d_r);
        for a in 0..r {
            let row = (k * r + a) * d_r;
            block += psi.view((row, row), (d_r, d_r));
        }
        for a in 0..r {
            let row = (k * r + a) * d_r;
            let mut v = out.view_mut((row, row), (d_r, d_r));
            v += block.unscale(r as f64);
        }
    }
    DensityOperator::from_parts_unchecked(out, inst.psi.layout().clone(), Normalization::Normalized)
}

/// Mixture of `n_mix` random pure states
/// `sum_k sqrt(p_k) |k>_{A_c} |psi_k>_{A_r R_r} |k>_{R_c}`.
pub fn random_coherent_state<R: Rng + ?Sized>(
    j: usize,
    r: usize,
    r_r: usize,
    n_mix: usize,
    rng: &mut R,
) -> DensityOperator {
    let d_rr = j * r_r;
    let n = j * r * d_rr;
    let mut m = CMat::zeros(n, n);
    let weights: Vec<f64> = (0..n_mix.max(1)).map(|_| rng.random_range(0.1..1.0)).collect();
    let wsum: f64 = weights.iter().sum();
    for w in weights {
        let p: Vec<f64> = (0..j).map(|_| rng.random_range(0.1..1.0)).collect();
        let ps: f64 = p.iter().sum();
        let mut v = qcap_linalg::CVec::zeros(n);
        for k in 0..j {
            let phi = random_pure(r * r_r, rng);
            let amp = (p[k] / ps).sqrt();
            for a in 0..r {
                for b in 0..r_r {
                    v[(k * r + a) * d_rr + k * r_r + b] = phi[a * r_r + b] * c64(amp, 0.0);
                }
            }
        }
        m += (&v * v.adjoint()).scale(w / wsum);
    }
    let m = qcap_linalg::hermitian_part(&m);
    let layout = SystemLayout::new(vec![("A", j * r), ("R", d_rr)])
        .expect("distinct labels")
        .with_split("A", j, r)
        .expect("consistent split");
    DensityOperator::from_parts_unchecked(m, layout, Normalization::Normalized)
}

/// Partial trace on `A = A_c x A_r`, keeping `A_c` when `keep_classical`
/// and `A_r` otherwise.
pub fn partial_trace_map(j: usize, r: usize, keep_classical: bool) -> ChannelRep {
    let kraus: Vec<CMat> = if keep_classical {
        (0..r)
            .map(|a| CMat::from_fn(j, j * r, |k, col| c64(if col == k * r + a { 1.0 } else { 0.0 }, 0.0)))
            .collect()
    } else {
        (0..j)
            .map(|k| CMat::from_fn(r, j * r, |a, col| c64(if col == k * r + a { 1.0 } else { 0.0 }, 0.0)))
            .collect()
    };
    ChannelRep::kraus_ab(kraus).expect("consistent shapes")
}
