use crate::instance::apply_on_first;
use crate::DecouplingError;
use qcap_channels::{random_channel, ChannelRep};
use qcap_linalg::{
    c64, dephase_matrix, eye, kron, max_abs, partial_trace_matrix, permute_matrix, trace_norm_hermitian, CMat,
    CVec, DensityOperator, Normalization, PureState, SystemLayout,
};
use rand::Rng;

const MIXED_TOL: f64 = 1e-8;
const BLOCK_TOL: f64 = 1e-10;

/// Message sizes of a code: `c` classical bits, `q` qubits, `e` ebits of
/// shared entanglement, and the error tolerance `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeParams {
    pub c: f64,
    pub q: f64,
    pub e: f64,
    pub delta: f64,
}

impl CodeParams {
    pub fn new(c: f64, q: f64, e: f64, delta: f64) -> Result<Self, DecouplingError> {
        if !(c >= 0.0 && q >= 0.0 && e.is_finite() && delta > 0.0 && delta <= 2.0) {
            return Err(DecouplingError::Instance(format!(
                "invalid code parameters (c, q, e, delta) = ({c}, {q}, {e}, {delta})"
            )));
        }
        Ok(Self { c, q, e, delta })
    }

    /// `(c, q, e)` when all three are non-negative integers.
    pub fn integer_bits(&self) -> Option<(u32, u32, u32)> {
        let as_int = |x: f64| (x >= 0.0 && x.fract() == 0.0 && x < 32.0).then_some(x as u32);
        Some((as_int(self.c)?, as_int(self.q)?, as_int(self.e)?))
    }
}

/// Residuals returned by [`verify_encoder_identity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderResidual {
    /// Trace distance between the two sides of the encoder identity.
    pub identity: f64,
    /// `||J(E) - C_{M_c}(J(E))||_1` for the encoder `E`: zero iff the
    /// encoder ignores coherences of the classical message.
    pub dephasing: f64,
}

/// Dimensions of a source state on `S_c S_r A`.
#[derive(Debug, Clone, Copy)]
struct SourceDims {
    d_c: usize,
    d_r: usize,
    d_a: usize,
}

impl SourceDims {
    fn d_s(&self) -> usize {
        self.d_c * self.d_r
    }
}

/// Reads `(d_{S_c}, d_{S_r}, d_A)` from a state whose first factor is `S`
/// (optionally split) and checks that `rho^S` is maximally mixed and `rho`
/// block diagonal in `S_c`.
fn source_dims(rho: &DensityOperator) -> Result<SourceDims, DecouplingError> {
    let layout = rho.layout();
    let first = &layout.factors()[0];
    let (d_c, d_r) = match layout.classical_split() {
        Some(sp) if sp.label == first.label => (sp.j, sp.r),
        _ => (1, first.dim),
    };
    let d_s = d_c * d_r;
    let d_a = rho.dim() / d_s;
    let m = rho.matrix();
    let rho_s = partial_trace_matrix(m, &[d_s, d_a], &[0]);
    let mixed = max_abs(&(rho_s - eye(d_s).unscale(d_s as f64)));
    if mixed > MIXED_TOL {
        return Err(DecouplingError::SourceNotMixed(mixed));
    }
    let block = max_abs(&(m - dephase_matrix(m, &[d_c, d_r, d_a], 0)));
    if block > BLOCK_TOL {
        return Err(DecouplingError::Instance(format!(
            "source is not block diagonal in S_c (residual {block:.3e})"
        )));
    }
    Ok(SourceDims { d_c, d_r, d_a })
}

/// `V_rho: S -> A E_0 E_c` with row index `(a * e0 + k) * d_c + j`, built
/// from the canonical Kraus operators of each block map.
fn block_stinespring(rho: &DensityOperator, dims: SourceDims) -> Result<(CMat, usize), DecouplingError> {
    let SourceDims { d_c, d_r, d_a } = dims;
    let n = d_r * d_a;
    let mut blocks = Vec::with_capacity(d_c);
    for j in 0..d_c {
        let rho_j = rho.matrix().view((j * n, j * n), (n, n)).scale(d_c as f64);
        let map = ChannelRep::from_choi(
            rho_j,
            SystemLayout::single("Sr", d_r),
            SystemLayout::single("A", d_a),
        )?;
        blocks.push(map.canonical_kraus());
    }
    let e0 = blocks.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let mut v = CMat::zeros(d_a * e0 * d_c, d_c * d_r);
    for (j, kraus) in blocks.iter().enumerate() {
        for (k, kk) in kraus.iter().enumerate() {
            for a in 0..d_a {
                for al in 0..d_r {
                    v[((a * e0 + k) * d_c + j, j * d_r + al)] = kk[(a, al)];
                }
            }
        }
    }
    Ok((v, e0))
}

/// `Psi_rho` as a matrix with rows on `R^` and columns on `B E E_0 E_c`,
/// plus `(d_B, d_E, e0)`.
fn psi_rho_matrix(
    rho: &DensityOperator,
    channel: &ChannelRep,
    dims: SourceDims,
) -> Result<(CMat, usize, usize, usize), DecouplingError> {
    if channel.d_in() != dims.d_a {
        return Err(DecouplingError::Instance(format!(
            "channel input dimension {} differs from dim A = {}",
            channel.d_in(),
            dims.d_a
        )));
    }
    let (v, e0) = block_stinespring(rho, dims)?;
    let (w, d_e) = channel.isometry();
    // V |Phi_ext> has coefficient matrix V^T / sqrt(d_S) (rows R^).
    let y = v.transpose().unscale((dims.d_s() as f64).sqrt());
    let z = y * kron(&w, &eye(e0 * dims.d_c)).transpose();
    Ok((z, channel.d_out(), d_e, e0))
}

/// The pure state `W_N V_rho |Phi_ext>` on `Rh_c Rh_r B E E0 Ec`, where
/// `rho` lives on `S x A` (the classical split of `S`, if any, gives
/// `S_c x S_r`) and `V_rho` is the block Stinespring dilation of the map
/// whose Choi state is `rho`.
pub fn build_psi_rho(rho: &DensityOperator, channel: &ChannelRep) -> Result<PureState, DecouplingError> {
    let dims = source_dims(rho)?;
    let (z, d_b, d_e, e0) = psi_rho_matrix(rho, channel, dims)?;
    let vec = CVec::from_iterator(z.len(), z.transpose().iter().copied());
    let layout = SystemLayout::new(vec![
        ("Rh_c", dims.d_c),
        ("Rh_r", dims.d_r),
        ("B", d_b),
        ("E", d_e),
        ("E0", e0),
        ("Ec", dims.d_c),
    ])?;
    Ok(PureState::new(vec, layout)?)
}

/// Embedding `|j, alpha, f> -> |j * d_r + alpha * 2^e + f>` of
/// `M_c M_q F_A` (or `R_c R_q F_B`) into `S_c S_r`.
fn embedding(c: u32, q: u32, e: u32, d_c: usize, d_r: usize) -> Result<CMat, DecouplingError> {
    let (nc, nqe) = (1usize << c, 1usize << (q + e));
    if nc > d_c || nqe > d_r {
        return Err(DecouplingError::Embedding { c, q, e, d_c, d_r });
    }
    let mut p = CMat::zeros(d_c * d_r, nc * nqe);
    for j in 0..nc {
        for x in 0..nqe {
            p[(j * d_r + x, j * nqe + x)] = c64(1.0, 0.0);
        }
    }
    Ok(p)
}

/// `G_s U` with `U = direct sum of us[j]` and `G_s |j> = |s(j)>`.
fn permuted_blocks(s: &[usize], us: &[CMat], d_r: usize) -> Result<CMat, DecouplingError> {
    let d_c = s.len();
    let mut seen = vec![false; d_c];
    for &t in s {
        if t >= d_c || std::mem::replace(&mut seen[t], true) {
            return Err(DecouplingError::Instance("s is not a permutation".into()));
        }
    }
    if us.len() != d_c || us.iter().any(|u| u.nrows() != d_r || u.ncols() != d_r) {
        return Err(DecouplingError::Instance(format!("need {d_c} unitaries of size {d_r}")));
    }
    let mut m = CMat::zeros(d_c * d_r, d_c * d_r);
    for (j, u) in us.iter().enumerate() {
        m.view_mut((s[j] * d_r, j * d_r), (d_r, d_r)).copy_from(u);
    }
    Ok(m)
}

/// Checks that tracing `E E_0 E_c` out of `(P~ G_s U on R^) Psi_rho` equals
/// the channel applied to the encoder `E_rho o P_{s,U}` acting on the
/// purified source `Phi_pur`. `E_rho` is rebuilt from the Choi state of the
/// whole `rho` rather than from the block dilation.
pub fn verify_encoder_identity(
    rho: &DensityOperator,
    channel: &ChannelRep,
    code: &CodeParams,
    s: &[usize],
    us: &[CMat],
) -> Result<EncoderResidual, DecouplingError> {
    let (c, q, e) = code
        .integer_bits()
        .ok_or_else(|| DecouplingError::Instance("the encoder needs integer c, q, e".into()))?;
    let dims = source_dims(rho)?;
    let (d_s, d_a) = (dims.d_s(), dims.d_a);
    let p = embedding(c, q, e, dims.d_c, dims.d_r)?;
    let d_m = p.ncols();
    let gu = permuted_blocks(s, us, dims.d_r)?;

    // Left side: act with P~ G_s U on R^ and trace out E E_0 E_c.
    let (z, d_b, d_e, e0) = psi_rho_matrix(rho, channel, dims)?;
    let p_tilde = p.adjoint().scale((d_s as f64 / d_m as f64).sqrt());
    let zp = &p_tilde * &gu * z;
    let n_e = d_e * e0 * dims.d_c;
    let qm = CMat::from_fn(d_m * d_b, n_e, |row, col| {
        let (r, b) = (row / d_b, row % d_b);
        zp[(r, b * n_e + col)]
    });
    let lhs = permute_matrix(&(&qm * qm.adjoint()), &[d_m, d_b], &[1, 0]);

    // Right side: N o E_rho o P_{s,U} on Phi_pur.
    let p_su = gu.transpose() * &p;
    let e_rho = ChannelRep::from_choi(
        rho.matrix().clone(),
        SystemLayout::single("S", d_s),
        SystemLayout::single("A", d_a),
    )?;
    let kraus: Vec<CMat> = e_rho.kraus().iter().map(|k| k * &p_su).collect();
    let phi = p_su.unscale((d_m as f64).sqrt());
    let vec = CVec::from_iterator(phi.len(), phi.transpose().iter().copied());
    let pur_s = &vec * vec.adjoint();
    let rhs = apply_on_first(&channel.kraus(), &apply_on_first(&e_rho.kraus(), &pur_s));

    let encoder = ChannelRep::kraus_ab(kraus)?;
    let choi = encoder.choi_matrix();
    let dephasing = trace_norm_hermitian(&(&choi - dephase_matrix(&choi, &[1 << c, 1 << (q + e), d_a], 0)));
    Ok(EncoderResidual {
        identity: trace_norm_hermitian(&(lhs - rhs)),
        dephasing,
    })
}

/// A random source state on `S x A` of the required form: `S = S_c x S_r`
/// (split recorded in the layout) and each block the Choi state of a random
/// channel `S_r -> A`, so that `rho^S` is maximally mixed.
pub fn random_source<R: Rng + ?Sized>(
    d_c: usize,
    d_r: usize,
    d_a: usize,
    rng: &mut R,
) -> Result<DensityOperator, DecouplingError> {
    let n = d_r * d_a;
    let mut m = CMat::zeros(d_c * n, d_c * n);
    for j in 0..d_c {
        let ch = random_channel(d_r, d_a, 2, rng)?;
        m.view_mut((j * n, j * n), (n, n)).copy_from(&ch.choi_matrix().unscale(d_c as f64));
    }
    let layout = SystemLayout::new(vec![("S", d_c * d_r), ("A", d_a)])?.with_split("S", d_c, d_r)?;
    Ok(DensityOperator::new(qcap_linalg::hermitian_part(&m), layout, Normalization::Normalized)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcap_channels::{standard_channel, StandardChannel};
    use qcap_linalg::{max_entangled, outer, partial_trace};
    use rand::SeedableRng;

    #[test]
    fn identity_channel_marginal_matches_channel_output() {
        let rho = DensityOperator::new(
            outer(&max_entangled(2)),
            SystemLayout::new(vec![("S", 2), ("A", 2)]).unwrap(),
            Normalization::Normalized,
        )
        .unwrap();
        let id = standard_channel(StandardChannel::Identity, 0.0).unwrap();
        let psi = build_psi_rho(&rho, &id).unwrap();
        assert!((psi.vector().norm() - 1.0).abs() < 1e-9);
        let marg = partial_trace(&psi.density(), &["Rh_c", "Rh_r", "B"]).unwrap();
        assert!(max_abs(&(marg.matrix() - rho.matrix())) < 1e-12);
    }

    #[test]
    fn rejects_sources_with_mixed_marginal_violations() {
        let rho = DensityOperator::new(
            outer(&qcap_linalg::ket(4, 0)),
            SystemLayout::new(vec![("S", 2), ("A", 2)]).unwrap(),
            Normalization::Normalized,
        )
        .unwrap();
        let id = standard_channel(StandardChannel::Identity, 0.0).unwrap();
        assert!(matches!(build_psi_rho(&rho, &id), Err(DecouplingError::SourceNotMixed(_))));
    }

    #[test]
    fn embedding_violation_is_reported() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let rho = random_source(2, 2, 2, &mut rng).unwrap();
        let id = standard_channel(StandardChannel::Identity, 0.0).unwrap();
        let code = CodeParams::new(1.0, 1.0, 1.0, 0.5).unwrap();
        let us = vec![eye(2), eye(2)];
        assert!(matches!(
            verify_encoder_identity(&rho, &id, &code, &[0, 1], &us),
            Err(DecouplingError::Embedding { .. })
        ));
    }

    #[test]
    fn trivial_permutation_identity_holds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let rho = random_source(2, 2, 2, &mut rng).unwrap();
        let ch = standard_channel(StandardChannel::AmplitudeDamping, 0.3).unwrap();
        let code = CodeParams::new(1.0, 0.0, 0.0, 0.5).unwrap();
        let res = verify_encoder_identity(&rho, &ch, &code, &[0, 1], &[eye(2), eye(2)]).unwrap();
        assert!(res.identity < 1e-8, "{res:?}");
        assert!(res.dephasing < 1e-10, "{res:?}");
    }
}
