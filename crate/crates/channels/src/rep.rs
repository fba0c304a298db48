use crate::ChannelError;
use qcap_linalg::{
    c64, eigh, kron, max_abs, partial_trace_matrix, permute_matrix, CMat, DensityOperator,
    Normalization, SystemLayout, Tolerances,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFlag {
    TracePreserving,
    TraceNonIncreasing,
    GeneralCp,
}

#[derive(Debug, Clone)]
pub enum ChannelKind {
    Kraus(Vec<CMat>),
    /// Normalized Choi matrix on `in x out`.
    Choi(CMat),
    /// Isometry `in -> out x E`, environment last.
    Stinespring { iso: CMat, env_dim: usize },
}

#[derive(Debug, Clone)]
pub struct ChannelRep {
    kind: ChannelKind,
    in_layout: SystemLayout,
    out_layout: SystemLayout,
    trace_flag: TraceFlag,
}

const TP_TOL: f64 = 1e-8;

fn classify(kraus: &[CMat], d_in: usize) -> TraceFlag {
    let mut s = CMat::zeros(d_in, d_in);
    for k in kraus {
        s += k.adjoint() * k;
    }
    if max_abs(&(&s - CMat::identity(d_in, d_in))) <= TP_TOL {
        return TraceFlag::TracePreserving;
    }
    let (vals, _) = eigh(&s);
    if vals.last().copied().unwrap_or(0.0) <= 1.0 + TP_TOL {
        TraceFlag::TraceNonIncreasing
    } else {
        TraceFlag::GeneralCp
    }
}

/// Layout of the Choi state: input labels, then output labels (primed on
/// collision with an input label).
pub fn choi_layout(
    in_layout: &SystemLayout,
    out_layout: &SystemLayout,
) -> Result<SystemLayout, ChannelError> {
    let mut out = out_layout.clone();
    for l in out_layout.labels() {
        if in_layout.contains(l) {
            let mut fresh = format!("{l}'");
            while in_layout.contains(&fresh) || out.contains(&fresh) {
                fresh.push('\'');
            }
            out = out.rename(l, &fresh)?;
        }
    }
    Ok(in_layout.concat(&out)?)
}

/// `sum_k K rho K^dagger` on raw matrices.
pub fn apply_kraus(kraus: &[CMat], rho: &CMat) -> CMat {
    let d = kraus[0].nrows();
    let mut out = CMat::zeros(d, d);
    for k in kraus {
        out += k * rho * k.adjoint();
    }
    out
}

/// `J^{-1}(X)(varsigma) = d_in Tr_in[(varsigma^T x I) X]` for a normalized
/// Choi matrix `X` on `in x out`.
pub fn choi_inverse(
    choi: &DensityOperator,
    varsigma: &DensityOperator,
) -> Result<DensityOperator, ChannelError> {
    let d_in = varsigma.dim();
    let total = choi.dim();
    if d_in == 0 || total % d_in != 0 {
        return Err(qcap_linalg::LinalgError::DimMismatch {
            expected: d_in,
            found: total,
        }
        .into());
    }
    let d_out = total / d_in;
    let m = choi_inverse_matrix(choi.matrix(), varsigma.matrix(), d_in);
    let n_in = varsigma.layout().len();
    let out_factors: Vec<(String, usize)> = choi.layout().factors()[n_in.min(choi.layout().len())..]
        .iter()
        .map(|f| (f.label.trim_end_matches('\'').to_string(), f.dim))
        .collect();
    let layout = if out_factors.iter().map(|f| f.1).product::<usize>() == d_out
        && !out_factors.is_empty()
    {
        SystemLayout::new(out_factors).unwrap_or_else(|_| SystemLayout::single("B", d_out))
    } else {
        SystemLayout::single("B", d_out)
    };
    Ok(DensityOperator::from_parts_unchecked(
        m,
        layout,
        varsigma.normalization(),
    ))
}

pub(crate) fn choi_inverse_matrix(x: &CMat, varsigma: &CMat, d_in: usize) -> CMat {
    let d_out = x.nrows() / d_in;
    let lhs = kron(&varsigma.transpose(), &CMat::identity(d_out, d_out));
    partial_trace_matrix(&(lhs * x), &[d_in, d_out], &[1]).scale(d_in as f64)
}

fn choi_from_kraus(kraus: &[CMat], d_in: usize) -> CMat {
    let d_out = kraus[0].nrows();
    let n = d_in * d_out;
    let mut j = CMat::zeros(n, n);
    for k in kraus {
        // vec_k[(i, b)] = K[b, i]
        let v = qcap_linalg::CVec::from_fn(n, |idx, _| k[(idx % d_out, idx / d_out)]);
        j += &v * v.adjoint();
    }
    j.unscale(d_in as f64)
}

fn kraus_from_choi(j: &CMat, d_in: usize, cutoff: f64) -> Vec<CMat> {
    let d_out = j.nrows() / d_in;
    let (vals, vecs) = eigh(j);
    let mut out = Vec::new();
    for idx in (0..vals.len()).rev() {
        if vals[idx] <= cutoff {
            continue;
        }
        let s = (d_in as f64 * vals[idx]).sqrt();
        out.push(CMat::from_fn(d_out, d_in, |b, i| {
            vecs[(i * d_out + b, idx)] * c64(s, 0.0)
        }));
    }
    if out.is_empty() {
        out.push(CMat::zeros(d_out, d_in));
    }
    out
}

impl ChannelRep {
    pub fn from_kraus(
        kraus: Vec<CMat>,
        in_layout: SystemLayout,
        out_layout: SystemLayout,
    ) -> Result<Self, ChannelError> {
        if kraus.is_empty() {
            return Err(ChannelError::NoKraus);
        }
        let expected = (out_layout.total_dim(), in_layout.total_dim());
        for (index, k) in kraus.iter().enumerate() {
            if k.shape() != expected {
                return Err(ChannelError::KrausShape {
                    index,
                    expected,
                    found: k.shape(),
                });
            }
        }
        let trace_flag = classify(&kraus, expected.1);
        Ok(Self {
            kind: ChannelKind::Kraus(kraus),
            in_layout,
            out_layout,
            trace_flag,
        })
    }

    /// Single-factor convenience constructor `A -> B`.
    pub fn kraus_ab(kraus: Vec<CMat>) -> Result<Self, ChannelError> {
        let (o, i) = kraus.first().ok_or(ChannelError::NoKraus)?.shape();
        Self::from_kraus(kraus, SystemLayout::single("A", i), SystemLayout::single("B", o))
    }

    pub fn from_choi(
        choi: CMat,
        in_layout: SystemLayout,
        out_layout: SystemLayout,
    ) -> Result<Self, ChannelError> {
        let n = in_layout.total_dim() * out_layout.total_dim();
        if choi.shape() != (n, n) {
            return Err(qcap_linalg::LinalgError::DimMismatch {
                expected: n,
                found: choi.nrows(),
            }
            .into());
        }
        let tol = Tolerances::DEFAULT;
        if max_abs(&(&choi - choi.adjoint())) > tol.hermitian.max(1e-9) {
            return Err(qcap_linalg::LinalgError::NotHermitian(max_abs(&(&choi - choi.adjoint()))).into());
        }
        let lmin = eigh(&choi).0[0];
        if lmin < tol.psd_floor {
            return Err(ChannelError::ChoiNotPsd(lmin));
        }
        let kraus = kraus_from_choi(&choi, in_layout.total_dim(), tol.rank_cutoff);
        let trace_flag = classify(&kraus, in_layout.total_dim());
        Ok(Self {
            kind: ChannelKind::Choi(choi),
            in_layout,
            out_layout,
            trace_flag,
        })
    }

    pub fn from_stinespring(
        iso: CMat,
        env_dim: usize,
        in_layout: SystemLayout,
        out_layout: SystemLayout,
    ) -> Result<Self, ChannelError> {
        let d_in = in_layout.total_dim();
        let d_out = out_layout.total_dim();
        if iso.shape() != (d_out * env_dim, d_in) {
            return Err(qcap_linalg::LinalgError::DimMismatch {
                expected: d_out * env_dim,
                found: iso.nrows(),
            }
            .into());
        }
        let kraus = stinespring_kraus(&iso, d_out, env_dim);
        let trace_flag = classify(&kraus, d_in);
        Ok(Self {
            kind: ChannelKind::Stinespring { iso, env_dim },
            in_layout,
            out_layout,
            trace_flag,
        })
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    pub fn in_layout(&self) -> &SystemLayout {
        &self.in_layout
    }

    pub fn out_layout(&self) -> &SystemLayout {
        &self.out_layout
    }

    pub fn trace_flag(&self) -> TraceFlag {
        self.trace_flag
    }

    pub fn d_in(&self) -> usize {
        self.in_layout.total_dim()
    }

    pub fn d_out(&self) -> usize {
        self.out_layout.total_dim()
    }

    /// Kraus operators of this representation (Choi: canonical eigen-Kraus).
    pub fn kraus(&self) -> Vec<CMat> {
        match &self.kind {
            ChannelKind::Kraus(k) => k.clone(),
            ChannelKind::Choi(j) => kraus_from_choi(j, self.d_in(), Tolerances::DEFAULT.rank_cutoff),
            ChannelKind::Stinespring { iso, env_dim } => {
                stinespring_kraus(iso, self.d_out(), *env_dim)
            }
        }
    }

    /// Minimal Kraus set from the Choi eigendecomposition (cutoff 1e-10).
    pub fn canonical_kraus(&self) -> Vec<CMat> {
        kraus_from_choi(&self.choi_matrix(), self.d_in(), Tolerances::DEFAULT.rank_cutoff)
    }

    pub fn choi_matrix(&self) -> CMat {
        match &self.kind {
            ChannelKind::Choi(j) => j.clone(),
            _ => choi_from_kraus(&self.kraus(), self.d_in()),
        }
    }

    /// Normalized Choi state on `in x out`.
    pub fn to_choi(&self) -> Result<DensityOperator, ChannelError> {
        let layout = choi_layout(&self.in_layout, &self.out_layout)?;
        let norm = if self.trace_flag == TraceFlag::TracePreserving {
            Normalization::Normalized
        } else {
            Normalization::Subnormalized
        };
        Ok(DensityOperator::from_parts_unchecked(
            self.choi_matrix(),
            layout,
            norm,
        ))
    }

    /// Same map in Kraus form.
    pub fn to_kraus_rep(&self) -> ChannelRep {
        Self {
            kind: ChannelKind::Kraus(self.kraus()),
            in_layout: self.in_layout.clone(),
            out_layout: self.out_layout.clone(),
            trace_flag: self.trace_flag,
        }
    }

    /// Stinespring isometry `sum_k K_k x |k>_E` with the canonical Kraus set.
    pub fn stinespring(&self) -> ChannelRep {
        let kraus = self.canonical_kraus();
        let (d_out, d_in) = kraus[0].shape();
        let e = kraus.len();
        let iso = CMat::from_fn(d_out * e, d_in, |row, a| kraus[row % e][(row / e, a)]);
        Self {
            kind: ChannelKind::Stinespring { iso, env_dim: e },
            in_layout: self.in_layout.clone(),
            out_layout: self.out_layout.clone(),
            trace_flag: self.trace_flag,
        }
    }

    /// Stinespring matrix `in -> out x E` from the Kraus operators of this
    /// representation (no canonicalization).
    pub fn isometry(&self) -> (CMat, usize) {
        if let ChannelKind::Stinespring { iso, env_dim } = &self.kind {
            return (iso.clone(), *env_dim);
        }
        let kraus = self.kraus();
        let (d_out, d_in) = kraus[0].shape();
        let e = kraus.len();
        (
            CMat::from_fn(d_out * e, d_in, |row, a| kraus[row % e][(row / e, a)]),
            e,
        )
    }

    /// Complementary map `Tr_out V (.) V^dagger` onto the environment `E` of
    /// the canonical dilation.
    pub fn complementary(&self) -> ChannelRep {
        complement_of(&self.canonical_kraus(), &self.in_layout, self.trace_flag)
    }

    /// Complementary map built from this representation's own Kraus operators.
    pub fn complementary_raw(&self) -> ChannelRep {
        complement_of(&self.kraus(), &self.in_layout, self.trace_flag)
    }

    /// Apply to a raw matrix on exactly the input space.
    pub fn apply_matrix(&self, rho: &CMat) -> CMat {
        apply_kraus(&self.kraus(), rho)
    }

    /// Apply to the input factors of `rho`, identity elsewhere. The output
    /// factors replace the input factors at the position of the first one.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator, ChannelError> {
        let layout = rho.layout();
        let in_labels = self.in_layout.labels();
        let mut in_pos = Vec::with_capacity(in_labels.len());
        for l in &in_labels {
            match layout.position(l) {
                Ok(p) => in_pos.push(p),
                Err(_) => {
                    return Err(ChannelError::InputMismatch(
                        in_labels.iter().map(|s| s.to_string()).collect(),
                    ))
                }
            }
        }
        for l in self.out_layout.labels() {
            if layout.contains(l) && !in_labels.contains(&l) {
                return Err(qcap_linalg::LinalgError::DuplicateLabel(l.to_string()).into());
            }
        }
        let dims = layout.dims();
        let others: Vec<usize> = (0..dims.len()).filter(|p| !in_pos.contains(p)).collect();
        let first = *in_pos.iter().min().expect("non-empty input");
        let before: Vec<usize> = others.iter().copied().filter(|&p| p < first).collect();
        let after: Vec<usize> = others.iter().copied().filter(|&p| p > first).collect();
        // Move inputs to the end: [before, after, inputs].
        let mut perm = before.clone();
        perm.extend(&after);
        perm.extend(&in_pos);
        let m = permute_matrix(rho.matrix(), &dims, &perm);
        let d_rest: usize = before.iter().chain(&after).map(|&p| dims[p]).product();
        let kraus: Vec<CMat> = self
            .kraus()
            .iter()
            .map(|k| kron(&CMat::identity(d_rest, d_rest), k))
            .collect();
        let out = apply_kraus(&kraus, &m);
        // Bring outputs back after `before`.
        let mut mid_dims: Vec<usize> = before.iter().chain(&after).map(|&p| dims[p]).collect();
        let n_out = self.out_layout.len();
        mid_dims.extend(self.out_layout.dims());
        let nb = before.len();
        let na = after.len();
        let mut back: Vec<usize> = (0..nb).collect();
        back.extend(nb + na..nb + na + n_out);
        back.extend(nb..nb + na);
        let out = permute_matrix(&out, &mid_dims, &back);
        let mut factors: Vec<(String, usize)> = before
            .iter()
            .map(|&p| (layout.factors()[p].label.clone(), dims[p]))
            .collect();
        factors.extend(
            self.out_layout
                .factors()
                .iter()
                .map(|f| (f.label.clone(), f.dim)),
        );
        factors.extend(
            after
                .iter()
                .map(|&p| (layout.factors()[p].label.clone(), dims[p])),
        );
        let new_layout = SystemLayout::new(factors)?;
        let norm = if self.trace_flag == TraceFlag::TracePreserving {
            rho.normalization()
        } else {
            Normalization::Subnormalized
        };
        Ok(DensityOperator::from_parts_unchecked(out, new_layout, norm))
    }

    /// `self o first`: apply `first`, then `self`.
    pub fn compose(&self, first: &ChannelRep) -> Result<ChannelRep, ChannelError> {
        if first.d_out() != self.d_in() {
            return Err(qcap_linalg::LinalgError::DimMismatch {
                expected: self.d_in(),
                found: first.d_out(),
            }
            .into());
        }
        let mut kraus = Vec::new();
        for a in self.kraus() {
            for b in first.kraus() {
                kraus.push(&a * &b);
            }
        }
        ChannelRep::from_kraus(kraus, first.in_layout.clone(), self.out_layout.clone())
    }

    /// `self^{x n}` with labels `X_1 .. X_n` for each factor `X`.
    pub fn tensor_power(&self, n: usize) -> Result<ChannelRep, ChannelError> {
        assert!(n >= 1, "tensor power needs n >= 1");
        if n == 1 {
            return Ok(self.clone());
        }
        let base = self.kraus();
        let mut kraus = base.clone();
        for _ in 1..n {
            let mut next = Vec::with_capacity(kraus.len() * base.len());
            for a in &kraus {
                for b in &base {
                    next.push(kron(a, b));
                }
            }
            kraus = next;
        }
        let index = |l: &SystemLayout| -> Result<SystemLayout, ChannelError> {
            let mut f = Vec::new();
            for i in 1..=n {
                for x in l.factors() {
                    f.push((format!("{}_{}", x.label, i), x.dim));
                }
            }
            Ok(SystemLayout::new(f)?)
        };
        ChannelRep::from_kraus(kraus, index(&self.in_layout)?, index(&self.out_layout)?)
    }

    /// Relabel input and output layouts (dimensions must agree).
    pub fn relabel(
        &self,
        in_layout: SystemLayout,
        out_layout: SystemLayout,
    ) -> Result<ChannelRep, ChannelError> {
        if in_layout.total_dim() != self.d_in() || out_layout.total_dim() != self.d_out() {
            return Err(qcap_linalg::LinalgError::DimMismatch {
                expected: self.d_in(),
                found: in_layout.total_dim(),
            }
            .into());
        }
        Ok(Self {
            kind: self.kind.clone(),
            in_layout,
            out_layout,
            trace_flag: self.trace_flag,
        })
    }
}

fn stinespring_kraus(iso: &CMat, d_out: usize, env: usize) -> Vec<CMat> {
    (0..env)
        .map(|k| CMat::from_fn(d_out, iso.ncols(), |b, a| iso[(b * env + k, a)]))
        .collect()
}

fn complement_of(kraus: &[CMat], in_layout: &SystemLayout, flag: TraceFlag) -> ChannelRep {
    let (d_out, d_in) = kraus[0].shape();
    let e = kraus.len();
    let comp: Vec<CMat> = (0..d_out)
        .map(|b| CMat::from_fn(e, d_in, |k, a| kraus[k][(b, a)]))
        .collect();
    let mut env_label = "E".to_string();
    while in_layout.contains(&env_label) {
        env_label.push('\'');
    }
    ChannelRep {
        kind: ChannelKind::Kraus(comp),
        in_layout: in_layout.clone(),
        out_layout: SystemLayout::single(&env_label, e),
        trace_flag: flag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{standard_channel, StandardChannel};
    use qcap_linalg::{ket, max_entangled, outer};

    fn ident() -> ChannelRep {
        ChannelRep::kraus_ab(vec![CMat::identity(2, 2)]).unwrap()
    }

    #[test]
    fn identity_choi_is_max_entangled() {
        let j = ident().to_choi().unwrap();
        assert!(max_abs(&(j.matrix() - outer(&max_entangled(2)))) < 1e-14);
        assert_eq!(j.layout().labels(), vec!["A", "B"]);
    }

    #[test]
    fn choi_inverse_of_max_entangled_is_identity() {
        let j = ident().to_choi().unwrap();
        let s = DensityOperator::on("A", outer(&(ket(2, 0) + ket(2, 1))).scale(0.5)).unwrap();
        let out = choi_inverse(&j, &s).unwrap();
        assert!(max_abs(&(out.matrix() - s.matrix())) < 1e-14);
    }

    #[test]
    fn identity_has_one_dimensional_environment() {
        let s = ident().stinespring();
        match s.kind() {
            ChannelKind::Stinespring { env_dim, .. } => assert_eq!(*env_dim, 1),
            _ => unreachable!(),
        }
        let c = ident().complementary();
        assert_eq!(c.d_out(), 1);
    }

    #[test]
    fn perfect_dephasing_copies_basis_to_environment() {
        let ch = standard_channel(StandardChannel::Dephasing, 1.0).unwrap();
        let c = ch.complementary();
        assert_eq!(c.d_out(), 2);
        for i in 0..2 {
            let out = c.apply_matrix(&outer(&ket(2, i)));
            let (vals, _) = eigh(&out);
            assert!((vals[1] - 1.0).abs() < 1e-10, "pure classical copy");
        }
        let plus = outer(&(ket(2, 0) + ket(2, 1))).scale(0.5);
        let out = c.apply_matrix(&plus);
        assert!(max_abs(&(out - CMat::identity(2, 2).scale(0.5))) < 1e-10);
    }

    #[test]
    fn apply_acts_on_the_named_factor() {
        let ch = standard_channel(StandardChannel::Depolarizing, 1.0).unwrap();
        let l = SystemLayout::new(vec![("R", 2), ("A", 2)]).unwrap();
        let rho = DensityOperator::new(outer(&max_entangled(2)), l, Normalization::Normalized)
            .unwrap();
        let out = ch.apply(&rho).unwrap();
        assert_eq!(out.layout().labels(), vec!["R", "B"]);
        assert!(max_abs(&(out.matrix() - CMat::identity(4, 4).scale(0.25))) < 1e-12);
    }
}
