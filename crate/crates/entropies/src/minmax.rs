use crate::sdp::{Lmi, Sdp, SolveStatus, SolverSettings};
use crate::EntropyError;
use nalgebra::DMatrix;
use qcap_linalg::{
    c64, eigh, kron, partial_trace, partial_trace_matrix, permute, purify_matrix, trace_re, CMat,
    DensityOperator, Normalization, SystemLayout, Tolerances,
};

/// What the optimizer returned alongside the value.
#[derive(Debug, Clone)]
pub enum Achiever {
    /// Optimal smoothed state in the ball around the input.
    Smoothed(DensityOperator),
    /// Optimal normalized conditioning state on `B`.
    Conditioning(DensityOperator),
}

#[derive(Debug, Clone)]
pub struct SmoothEntropyResult {
    /// Bits.
    pub value: f64,
    pub epsilon: f64,
    pub achiever: Option<Achiever>,
    pub status: SolveStatus,
    /// Relative primal-dual gap of the underlying program.
    pub duality_gap: f64,
}

impl SmoothEntropyResult {
    fn negate(mut self) -> Self {
        self.value = -self.value;
        self.achiever = None;
        self
    }
}

/// Reduced state on `a x b` with factors ordered `a` then `b`, plus the two
/// sub-layouts. Labels outside `a` and `b` are traced out.
pub fn bipartite(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
) -> Result<(CMat, SystemLayout, SystemLayout), EntropyError> {
    let overlap: Vec<String> = a
        .iter()
        .filter(|l| b.contains(l))
        .map(|s| s.to_string())
        .collect();
    if !overlap.is_empty() {
        return Err(EntropyError::Overlap(overlap));
    }
    let order: Vec<&str> = a.iter().chain(b).copied().collect();
    let reduced = partial_trace(rho, &order)?;
    let reduced = permute(&reduced, &order)?;
    let la = rho.layout().select(a)?.reorder(a)?;
    let lb = rho.layout().select(b)?.reorder(b)?;
    Ok((reduced.into_matrix(), la, lb))
}

fn is_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im.abs() <= 1e-15)
}

/// Eigendecomposition that keeps real input real.
fn eigh_aware(m: &CMat) -> (Vec<f64>, CMat) {
    if !is_real(m) {
        return eigh(m);
    }
    let r = DMatrix::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
    let e = r.symmetric_eigen();
    let mut idx: Vec<usize> = (0..m.nrows()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(m.nrows(), m.nrows(), |i, k| c64(e.eigenvectors[(i, idx[k])], 0.0));
    (vals, vecs)
}

/// Support of a PSD matrix: `(Lambda, V)` with `m ~ V Lambda V^dagger`.
fn support(m: &CMat) -> (Vec<f64>, CMat) {
    let (vals, vecs) = eigh_aware(m);
    let cut = Tolerances::DEFAULT.rank_cutoff;
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cut).collect();
    let v = CMat::from_fn(m.nrows(), keep.len(), |r, k| vecs[(r, keep[k])]);
    (keep.iter().map(|&i| vals[i]).collect(), v)
}

fn check_eps(eps: f64) -> Result<(), EntropyError> {
    if !(0.0..1.0).contains(&eps) || eps.is_nan() {
        return Err(EntropyError::BadEpsilon(eps));
    }
    Ok(())
}

fn conditioning(sigma: CMat, lb: &SystemLayout) -> Option<Achiever> {
    let t = trace_re(&sigma);
    if t <= 0.0 {
        return None;
    }
    let s = qcap_linalg::hermitian_part(&sigma).unscale(t);
    Some(Achiever::Conditioning(DensityOperator::from_parts_unchecked(
        s,
        lb.clone(),
        Normalization::Normalized,
    )))
}

/// `H_min(A|B)_{rho|varsigma}`; `-inf` when `supp rho` is not inside
/// `supp(I x varsigma)`, `+inf` for `rho = 0`.
pub fn hmin_fixed(
    rho: &DensityOperator,
    varsigma: &DensityOperator,
    a: &[&str],
    b: &[&str],
) -> Result<f64, EntropyError> {
    let (m, la, lb) = bipartite(rho, a, b)?;
    let d_a = la.total_dim();
    if varsigma.dim() != lb.total_dim() {
        return Err(qcap_linalg::LinalgError::DimMismatch {
            expected: lb.total_dim(),
            found: varsigma.dim(),
        }
        .into());
    }
    let s = kron(&CMat::identity(d_a, d_a), varsigma.matrix());
    let (vals, vecs) = eigh(&s);
    let cut = Tolerances::DEFAULT.rank_cutoff;
    let n = vals.len();
    let mut w = CMat::zeros(n, n);
    let mut off = CMat::zeros(n, n);
    for k in 0..n {
        let v = vecs.column(k);
        if vals[k] > cut {
            w += (&v * v.adjoint()).scale(1.0 / vals[k].sqrt());
        } else {
            off += &v * v.adjoint();
        }
    }
    let leak = trace_re(&(&off * &m * &off));
    if leak > 1e-10 {
        return Ok(f64::NEG_INFINITY);
    }
    let lmax = eigh(&(&w * &m * &w)).0.last().copied().unwrap_or(0.0);
    if lmax <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-lmax.log2())
}

pub fn hmin(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<SmoothEntropyResult, EntropyError> {
    hmin_with(rho, a, b, &SolverSettings::from_env())
}

/// `H_min(A|B)_rho = -log min{Tr sigma : I x sigma >= rho}`.
pub fn hmin_with(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
    settings: &SolverSettings,
) -> Result<SmoothEntropyResult, EntropyError> {
    let (m, la, lb) = bipartite(rho, a, b)?;
    let (value, sigma, status, gap) = hmin_matrix(&m, la.total_dim(), lb.total_dim(), settings)?;
    Ok(SmoothEntropyResult {
        value,
        epsilon: 0.0,
        achiever: conditioning(sigma, &lb),
        status,
        duality_gap: gap,
    })
}

pub(crate) fn hmin_matrix(
    m: &CMat,
    d_a: usize,
    d_b: usize,
    settings: &SolverSettings,
) -> Result<(f64, CMat, SolveStatus, f64), EntropyError> {
    if trace_re(m) <= 0.0 {
        return Err(EntropyError::ZeroState);
    }
    let real = is_real(m);
    let mut p = Sdp::new();
    let sigma = p.hermitian_var(d_b, real);
    p.add_objective(&sigma.trace_terms().iter().map(|&(v, w)| (v, -w)).collect::<Vec<_>>());
    let mut l = Lmi::new(d_a * d_b);
    l.add_var(0, 0, &sigma.kron_identity_left(d_a), 1.0);
    l.add_const(0, 0, &(-m));
    p.add_lmi(l);
    let sol = p.solve(settings);
    let t = -sol.value;
    let value = if t > 0.0 { -t.log2() } else { f64::INFINITY };
    Ok((value, sigma.value(&sol.y), sol.status, sol.rel_gap))
}

pub fn hmin_smooth(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
    eps: f64,
) -> Result<SmoothEntropyResult, EntropyError> {
    hmin_smooth_with(rho, a, b, eps, &SolverSettings::from_env())
}

/// `H_min^eps(A|B)_rho`: the supremum of `H_min` over subnormalized states
/// within purified distance `eps` of `rho`.
pub fn hmin_smooth_with(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
    eps: f64,
    settings: &SolverSettings,
) -> Result<SmoothEntropyResult, EntropyError> {
    check_eps(eps)?;
    if eps == 0.0 {
        return hmin_with(rho, a, b, settings);
    }
    let (m, la, lb) = bipartite(rho, a, b)?;
    let (value, hat, status, gap) =
        hmin_smooth_matrix(&m, la.total_dim(), lb.total_dim(), eps, settings)?;
    let layout = la.concat(&lb)?;
    Ok(SmoothEntropyResult {
        value,
        epsilon: eps,
        achiever: Some(Achiever::Smoothed(DensityOperator::from_parts_unchecked(
            qcap_linalg::hermitian_part(&hat),
            layout,
            Normalization::Subnormalized,
        ))),
        status,
        duality_gap: gap,
    })
}

pub(crate) fn hmin_smooth_matrix(
    m: &CMat,
    d_a: usize,
    d_b: usize,
    eps: f64,
    settings: &SolverSettings,
) -> Result<(f64, CMat, SolveStatus, f64), EntropyError> {
    let tr = trace_re(m);
    if tr <= 0.0 {
        return Err(EntropyError::ZeroState);
    }
    let d = d_a * d_b;
    let real = is_real(m);
    let (lam, v) = support(m);
    let k = lam.len();
    let mut p = Sdp::new();
    let sigma = p.hermitian_var(d_b, real);
    let hat = p.hermitian_var(d, real);
    let y = p.matrix_var(k, d, real);
    p.add_objective(&sigma.trace_terms().iter().map(|&(v, w)| (v, -w)).collect::<Vec<_>>());

    // I x sigma >= hat
    let mut l1 = Lmi::new(d);
    l1.add_var(0, 0, &sigma.kron_identity_left(d_a), 1.0);
    l1.add_var(0, 0, &hat, -1.0);
    p.add_lmi(l1);

    // [[Lambda, Y], [Y^dagger, hat]] >= 0, so Re Tr(Y V) <= ||sqrt(rho) sqrt(hat)||_1
    let mut l2 = Lmi::new(k + d);
    let lam_m = CMat::from_fn(k, k, |i, j| c64(if i == j { lam[i] } else { 0.0 }, 0.0));
    l2.add_const(0, 0, &lam_m);
    l2.add_var(0, k, &y, 1.0);
    l2.add_var(k, k, &hat, 1.0);
    p.add_lmi(l2);

    let target = (1.0 - eps * eps).sqrt();
    let mut fid = y.re_trace_product(&v);
    let slack = 1.0 - tr;
    let hat_tr = hat.trace_terms();
    if slack > Tolerances::DEFAULT.trace {
        // t <= sqrt((1 - Tr rho)(1 - Tr hat)) as a 2x2 block.
        let t = p.scalar_var();
        fid.push((t, 1.0));
        let mut l3 = Lmi::new(2);
        l3.add_const_entry(0, 0, c64(slack, 0.0));
        l3.add_var_entry(0, 1, t, c64(1.0, 0.0));
        l3.add_const_entry(1, 1, c64(1.0, 0.0));
        l3.add_terms(1, &hat_tr.iter().map(|&(v, w)| (v, -w)).collect::<Vec<_>>());
        p.add_lmi(l3);
    } else {
        p.add_scalar(1.0, &hat_tr.iter().map(|&(v, w)| (v, -w)).collect::<Vec<_>>());
    }
    p.add_scalar(-target, &fid);

    let sol = p.solve(settings);
    let t = -sol.value;
    let value = if t > 0.0 { -t.log2() } else { f64::INFINITY };
    Ok((value, hat.value(&sol.y), sol.status, sol.rel_gap))
}

pub fn hmax(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<SmoothEntropyResult, EntropyError> {
    hmax_with(rho, a, b, &SolverSettings::from_env())
}

/// Purification `|psi>_{ABR}` of the reduced `rho_AB` and its marginal on `AR`.
fn purified_ar(m: &CMat, d_a: usize, d_b: usize) -> (CMat, usize) {
    let (vec, r) = purify_matrix(m, Tolerances::DEFAULT.rank_cutoff);
    let full = &vec * vec.adjoint();
    (partial_trace_matrix(&full, &[d_a, d_b, r], &[0, 2]), r)
}

/// `H_max(A|B)_rho = -H_min(A|R)_psi` for a purification `psi` of `rho`.
pub fn hmax_with(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
    settings: &SolverSettings,
) -> Result<SmoothEntropyResult, EntropyError> {
    let (m, la, lb) = bipartite(rho, a, b)?;
    if trace_re(&m) <= 0.0 {
        return Err(EntropyError::ZeroState);
    }
    let d_a = la.total_dim();
    let (ar, r) = purified_ar(&m, d_a, lb.total_dim());
    let (value, _, status, gap) = hmin_matrix(&ar, d_a, r, settings)?;
    Ok(SmoothEntropyResult {
        value: -value,
        epsilon: 0.0,
        achiever: None,
        status,
        duality_gap: gap,
    })
}

/// `H_max(A|B)_rho = log sup_varsigma ||sqrt(rho) sqrt(I x varsigma)||_1^2`
/// solved directly as a fidelity program.
pub fn hmax_direct(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
    settings: &SolverSettings,
) -> Result<SmoothEntropyResult, EntropyError> {
    let (m, la, lb) = bipartite(rho, a, b)?;
    if trace_re(&m) <= 0.0 {
        return Err(EntropyError::ZeroState);
    }
    let (d_a, d_b) = (la.total_dim(), lb.total_dim());
    let d = d_a * d_b;
    let real = is_real(&m);
    let (lam, v) = support(&m);
    let k = lam.len();
    let mut p = Sdp::new();
    let sigma = p.hermitian_var(d_b, real);
    let y = p.matrix_var(k, d, real);
    p.add_objective(&y.re_trace_product(&v));
    let mut l = Lmi::new(k + d);
    let lam_m = CMat::from_fn(k, k, |i, j| c64(if i == j { lam[i] } else { 0.0 }, 0.0));
    l.add_const(0, 0, &lam_m);
    l.add_var(0, k, &y, 1.0);
    l.add_var(k, k, &sigma.kron_identity_left(d_a), 1.0);
    p.add_lmi(l);
    p.add_scalar(
        1.0,
        &sigma.trace_terms().iter().map(|&(v, w)| (v, -w)).collect::<Vec<_>>(),
    );
    let sol = p.solve(settings);
    let value = if sol.value > 0.0 {
        2.0 * sol.value.log2()
    } else {
        f64::NEG_INFINITY
    };
    Ok(SmoothEntropyResult {
        value,
        epsilon: 0.0,
        achiever: conditioning(sigma.value(&sol.y), &lb),
        status: sol.status,
        duality_gap: sol.rel_gap,
    })
}

pub fn hmax_smooth(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
    eps: f64,
) -> Result<SmoothEntropyResult, EntropyError> {
    hmax_smooth_with(rho, a, b, eps, &SolverSettings::from_env())
}

/// `H_max^eps(A|B)_rho = -H_min^eps(A|R)_psi` for a purification `psi`.
pub fn hmax_smooth_with(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
    eps: f64,
    settings: &SolverSettings,
) -> Result<SmoothEntropyResult, EntropyError> {
    check_eps(eps)?;
    if eps == 0.0 {
        return hmax_with(rho, a, b, settings);
    }
    let (m, la, lb) = bipartite(rho, a, b)?;
    if trace_re(&m) <= 0.0 {
        return Err(EntropyError::ZeroState);
    }
    let d_a = la.total_dim();
    let (ar, r) = purified_ar(&m, d_a, lb.total_dim());
    let (value, _, status, gap) = hmin_smooth_matrix(&ar, d_a, r, eps, settings)?;
    Ok(SmoothEntropyResult {
        value,
        epsilon: eps,
        achiever: None,
        status,
        duality_gap: gap,
    }
    .negate())
}
