use crate::{
    c64, eigh, kron, psd_sqrt, trace_norm, trace_norm_hermitian, CMat, CVec, DensityOperator,
    LinalgError, Normalization, PureState, SystemLayout, Tolerances,
};

/// Kronecker product of two operators; the layout is the concatenation.
pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator, LinalgError> {
    let layout = a.layout().concat(b.layout())?;
    let norm = if a.normalization() == Normalization::Normalized
        && b.normalization() == Normalization::Normalized
    {
        Normalization::Normalized
    } else {
        Normalization::Subnormalized
    };
    Ok(DensityOperator::from_parts_unchecked(
        kron(a.matrix(), b.matrix()),
        layout,
        norm,
    ))
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Flat offsets of all multi-indices over the factors in `which` (in order).
fn offsets(dims: &[usize], which: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &p in which {
        let mut next = Vec::with_capacity(out.len() * dims[p]);
        for &o in &out {
            for k in 0..dims[p] {
                next.push(o + k * st[p]);
            }
        }
        out = next;
    }
    out
}

/// Partial trace of a raw matrix keeping the factor positions in `keep`
/// (sorted ascending internally; the output keeps layout order).
pub fn partial_trace_matrix(m: &CMat, dims: &[usize], keep: &[usize]) -> CMat {
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let ok = offsets(dims, &keep);
    let ot = offsets(dims, &traced);
    let dk = ok.len();
    let mut out = CMat::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut s = c64(0.0, 0.0);
            for &t in &ot {
                s += m[(ok[a] + t, ok[b] + t)];
            }
            out[(a, b)] = s;
        }
    }
    out
}

/// Reduced operator on the labels in `keep`; factor order is preserved.
pub fn partial_trace(
    rho: &DensityOperator,
    keep: &[&str],
) -> Result<DensityOperator, LinalgError> {
    let layout = rho.layout();
    let mut pos = Vec::with_capacity(keep.len());
    for k in keep {
        pos.push(layout.position(k)?);
    }
    let m = partial_trace_matrix(rho.matrix(), &layout.dims(), &pos);
    Ok(DensityOperator::from_parts_unchecked(
        m,
        layout.select(keep)?,
        rho.normalization(),
    ))
}

/// Reorder tensor factors of a raw matrix: output factor `i` is input factor
/// `perm[i]`.
pub fn permute_matrix(m: &CMat, dims: &[usize], perm: &[usize]) -> CMat {
    let map = permutation_map(dims, perm);
    let d = map.len();
    CMat::from_fn(d, d, |i, j| m[(map[i], map[j])])
}

/// Reorder tensor factors of a raw vector (same convention as [`permute_matrix`]).
pub fn permute_vector(v: &CVec, dims: &[usize], perm: &[usize]) -> CVec {
    let map = permutation_map(dims, perm);
    CVec::from_fn(map.len(), |i, _| v[map[i]])
}

/// `map[new_index] = old_index`.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let old_st = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let total: usize = dims.iter().product();
    let mut map = vec![0usize; total];
    let mut digits = vec![0usize; dims.len()];
    for (idx, slot) in map.iter_mut().enumerate() {
        let mut r = idx;
        for i in (0..new_dims.len()).rev() {
            digits[i] = r % new_dims[i];
            r /= new_dims[i];
        }
        *slot = perm
            .iter()
            .enumerate()
            .map(|(i, &p)| digits[i] * old_st[p])
            .sum();
    }
    map
}

/// Explicit factor reordering to the label order `order`.
pub fn permute(rho: &DensityOperator, order: &[&str]) -> Result<DensityOperator, LinalgError> {
    let layout = rho.layout();
    let new_layout = layout.reorder(order)?;
    let perm: Vec<usize> = order
        .iter()
        .map(|l| layout.position(l))
        .collect::<Result<_, _>>()?;
    Ok(DensityOperator::from_parts_unchecked(
        permute_matrix(rho.matrix(), &layout.dims(), &perm),
        new_layout,
        rho.normalization(),
    ))
}

/// Purification vector of a PSD matrix: `sum_k sqrt(l_k) |v_k>|k>` with the
/// reference dimension equal to the numerical rank (at least one).
pub fn purify_matrix(m: &CMat, cutoff: f64) -> (CVec, usize) {
    let d = m.nrows();
    let (vals, vecs) = eigh(m);
    let kept: Vec<usize> = (0..d).filter(|&i| vals[i] > cutoff).collect();
    let kept = if kept.is_empty() { vec![d - 1] } else { kept };
    let r = kept.len();
    let mut v = CVec::zeros(d * r);
    for (k, &i) in kept.iter().enumerate() {
        let s = vals[i].max(0.0).sqrt();
        for a in 0..d {
            v[a * r + k] = vecs[(a, i)] * s;
        }
    }
    (v, r)
}

fn fresh_label(layout: &SystemLayout, base: &str) -> String {
    let mut l = base.to_string();
    while layout.contains(&l) {
        l.push('\'');
    }
    l
}

/// Purification on `layout x R` with `dim R = rank(rho)`. The reference is
/// labeled `R` (primed until unique).
pub fn purify(rho: &DensityOperator) -> Result<PureState, LinalgError> {
    let label = fresh_label(rho.layout(), "R");
    purify_with_label(rho, &label)
}

pub fn purify_with_label(rho: &DensityOperator, label: &str) -> Result<PureState, LinalgError> {
    if rho.normalization() != Normalization::Normalized {
        return Err(LinalgError::NeedsNormalized);
    }
    let (v, r) = purify_matrix(rho.matrix(), Tolerances::DEFAULT.rank_cutoff);
    let layout = rho.layout().concat(&SystemLayout::single(label, r))?;
    // Eigenvalue truncation removes at most d * cutoff of weight; renormalize.
    let n = v.norm();
    PureState::new(v.unscale(n), layout)
}

fn check_same(a: &DensityOperator, b: &DensityOperator) -> Result<(), LinalgError> {
    if a.dim() != b.dim() || a.layout().dims() != b.layout().dims() {
        return Err(LinalgError::DimMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Fidelity `||sqrt(a) sqrt(b)||_1` of raw PSD matrices.
pub fn fidelity_matrix(a: &CMat, b: &CMat) -> f64 {
    trace_norm(&(psd_sqrt(a) * psd_sqrt(b)))
}

/// Generalized fidelity `||sqrt(rho) sqrt(sigma)||_1 + sqrt((1 - Tr rho)(1 - Tr sigma))`.
pub fn generalized_fidelity(
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<f64, LinalgError> {
    check_same(rho, sigma)?;
    Ok(generalized_fidelity_matrix(rho.matrix(), sigma.matrix()))
}

pub fn generalized_fidelity_matrix(a: &CMat, b: &CMat) -> f64 {
    let ta = crate::trace_re(a);
    let tb = crate::trace_re(b);
    let credit = ((1.0 - ta).max(0.0) * (1.0 - tb).max(0.0)).sqrt();
    (fidelity_matrix(a, b) + credit).clamp(0.0, 1.0)
}

/// Purified distance `sqrt(1 - F^2)` with the generalized fidelity.
pub fn purified_distance(
    rho: &DensityOperator,
    sigma: &DensityOperator,
) -> Result<f64, LinalgError> {
    let f = generalized_fidelity(rho, sigma)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

pub fn purified_distance_matrix(a: &CMat, b: &CMat) -> f64 {
    let f = generalized_fidelity_matrix(a, b);
    (1.0 - f * f).max(0.0).sqrt()
}

/// `||rho - sigma||_1` (no factor 1/2).
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64, LinalgError> {
    check_same(rho, sigma)?;
    Ok(trace_norm_hermitian(&(rho.matrix() - sigma.matrix())))
}

/// Zero all entries that are off-diagonal in the computational basis of
/// factor position `pos`.
pub fn dephase_matrix(m: &CMat, dims: &[usize], pos: usize) -> CMat {
    let st = strides(dims);
    let digit = |i: usize| (i / st[pos]) % dims[pos];
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| {
        if digit(i) == digit(j) {
            m[(i, j)]
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// Completely dephasing map on one factor.
pub fn dephase(rho: &DensityOperator, factor: &str) -> Result<DensityOperator, LinalgError> {
    let pos = rho.layout().position(factor)?;
    Ok(DensityOperator::from_parts_unchecked(
        dephase_matrix(rho.matrix(), &rho.layout().dims(), pos),
        rho.layout().clone(),
        rho.normalization(),
    ))
}
