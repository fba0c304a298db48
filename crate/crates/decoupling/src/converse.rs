use crate::instance::{apply_on_first, RPDInstance};
use crate::DecouplingError;
use qcap_channels::TraceFlag;
use qcap_entropies::hmin_smooth;
use qcap_linalg::{
    kron, max_abs, outer, partial_trace_matrix, permute_matrix, purify_matrix, trace_norm_hermitian, CMat,
    DensityOperator, Normalization, SystemLayout,
};

const FORM_TOL: f64 = 1e-8;

/// Status of one converse inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    /// The smoothing parameter is at least 1, so the inequality says nothing.
    Vacuous,
}

#[derive(Debug, Clone)]
pub struct ConverseReport {
    /// `||T(Psi) - Omega||_1`.
    pub distance: f64,
    pub lambda: f64,
    pub lambda_prime: f64,
    /// Left and right sides of the first inequality (bits).
    pub first: (f64, f64),
    pub second: (f64, f64),
    pub verdicts: (Verdict, Verdict),
}

impl ConverseReport {
    /// Neither inequality is violated.
    pub fn holds(&self) -> bool {
        self.verdicts.0 != Verdict::Violated && self.verdicts.1 != Verdict::Violated
    }
}

/// Smoothing parameter of the first inequality.
pub fn lambda(delta: f64, iota: f64, upsilon: f64) -> f64 {
    let y = 20.0 * upsilon + 2.0 * delta;
    2.0 * (iota + 4.0 * y.sqrt()).sqrt()
        + (2.0 * y.sqrt()).sqrt()
        + 2.0 * (2.0 * delta).sqrt()
        + 2.0 * y.sqrt()
        + 3.0 * upsilon
}

/// Smoothing parameter of the second inequality.
pub fn lambda_prime(delta: f64, iota: f64, upsilon: f64) -> f64 {
    let x = 2f64.sqrt() * (24.0 * upsilon + 2.0 * delta).powf(0.25);
    upsilon
        + (4.0 * (iota + 2.0 * x).sqrt() + 2.0 * x.sqrt() + (4.0 * (iota + 8.0).sqrt() + 24.0) * x).sqrt()
}

/// `Omega = sum_j p_j varsigma_j x Psi_j^{R_r} x |j><j|^{R_c}` on `E x R`,
/// with `p_j` and `Psi_j` read off the instance.
pub fn product_omega(inst: &RPDInstance, varsigma: &[CMat]) -> Result<DensityOperator, DecouplingError> {
    let (j, r_r) = (inst.j(), inst.r_ref());
    if varsigma.len() != j {
        return Err(DecouplingError::Instance(format!("need {j} output states, got {}", varsigma.len())));
    }
    let d_e = inst.map_t().d_out();
    let psi_r = partial_trace_matrix(inst.psi().matrix(), &[j * inst.r(), j, r_r], &[1, 2]);
    let mut omega = CMat::zeros(d_e * j * r_r, d_e * j * r_r);
    for (k, s) in varsigma.iter().enumerate() {
        if s.nrows() != d_e {
            return Err(DecouplingError::Instance("output state has the wrong dimension".into()));
        }
        let block = psi_r.view((k * r_r, k * r_r), (r_r, r_r)).into_owned();
        let proj = outer(&qcap_linalg::ket(j, k));
        omega += kron(s, &kron(&proj, &block));
    }
    Ok(DensityOperator::from_parts_unchecked(
        omega,
        SystemLayout::new(vec![("E", d_e), ("R", j * r_r)])?,
        Normalization::Normalized,
    ))
}

/// Checks that `omega` on `E x R_c x R_r` is block diagonal in `R_c`, each
/// block a product, and the `R` marginal matches the dephased `Psi^R`.
fn check_omega_form(inst: &RPDInstance, omega: &CMat) -> Result<(), DecouplingError> {
    let (j, r_r) = (inst.j(), inst.r_ref());
    let d_e = omega.nrows() / (j * r_r);
    let bad = |what: &str| DecouplingError::Instance(format!("Omega is not of decoupled form: {what}"));
    if d_e * j * r_r != omega.nrows() || d_e != inst.map_t().d_out() {
        return Err(bad("dimension"));
    }
    // Move R_c to the front so each j-block is contiguous.
    let m = permute_matrix(omega, &[d_e, j, r_r], &[1, 0, 2]);
    let psi_r = partial_trace_matrix(inst.psi().matrix(), &[j * inst.r(), j, r_r], &[1, 2]);
    let n = d_e * r_r;
    for k in 0..j {
        for l in 0..j {
            let blk = m.view((k * n, l * n), (n, n)).into_owned();
            if k != l {
                if max_abs(&blk) > FORM_TOL {
                    return Err(bad("off-diagonal classical blocks"));
                }
                continue;
            }
            let e = partial_trace_matrix(&blk, &[d_e, r_r], &[0]);
            let rr = partial_trace_matrix(&blk, &[d_e, r_r], &[1]);
            let target = psi_r.view((k * r_r, k * r_r), (r_r, r_r)).into_owned();
            if max_abs(&(&rr - &target)) > FORM_TOL {
                return Err(bad("reference marginal"));
            }
            let p = qcap_linalg::trace_re(&target);
            if p > 0.0 && max_abs(&(kron(&e, &rr).unscale(p) - &blk)) > FORM_TOL {
                return Err(bad("block is not a product"));
            }
        }
    }
    Ok(())
}

fn verdict(smoothing: f64, lhs: f64, rhs: f64) -> Verdict {
    if smoothing >= 1.0 {
        Verdict::Vacuous
    } else if lhs >= rhs - 1e-6 {
        Verdict::Holds
    } else {
        Verdict::Violated
    }
}

/// Evaluates both converse inequalities for an `Omega` of decoupled form
/// within `delta` of `T(Psi)`. Smoothing parameters at or above 1 make the
/// corresponding inequality vacuous and its entropies are not computed
/// (reported as NaN).
pub fn check_converse_theorem(
    inst: &RPDInstance,
    omega: &DensityOperator,
    delta: f64,
    iota: f64,
    upsilon: f64,
) -> Result<ConverseReport, DecouplingError> {
    if !(0.0..0.5).contains(&upsilon) || !(iota > 0.0 && iota <= 1.0) || delta < 0.0 {
        return Err(DecouplingError::Instance(
            "need upsilon in [0, 1/2), iota in (0, 1], delta >= 0".into(),
        ));
    }
    if inst.map_t().trace_flag() != TraceFlag::TracePreserving {
        return Err(DecouplingError::Instance("the map must be trace preserving".into()));
    }
    check_omega_form(inst, omega.matrix())?;
    let t_psi = apply_on_first(&inst.map_t().kraus(), inst.psi().matrix());
    let distance = trace_norm_hermitian(&(t_psi - omega.matrix()));
    if distance > delta + 1e-12 {
        return Err(DecouplingError::Hypothesis { distance, delta });
    }

    let (j, r, r_r) = (inst.j(), inst.r(), inst.r_ref());
    let lam = lambda(delta, iota, upsilon);
    let lam_p = lambda_prime(delta, iota, upsilon);

    // Purification on A x R x B, dephased on A_c, then the complementary map A -> C.
    let (vec, d_b) = purify_matrix(inst.psi().matrix(), 1e-12);
    let vec = vec.unscale(vec.norm());
    let pure = outer(&vec);
    let dephased = inst.dephase_ac(&pure);
    let comp = inst.map_t().complementary();
    let out = apply_on_first(&comp.kraus(), &dephased);
    let out = DensityOperator::from_parts_unchecked(
        out,
        SystemLayout::new(vec![("C", comp.d_out()), ("Rc", j), ("Rr", r_r), ("B", d_b)])?,
        Normalization::Normalized,
    );
    let psi = inst.expanded_psi();
    let c_psi = DensityOperator::from_parts_unchecked(
        inst.dephase_ac(psi.matrix()),
        psi.layout().clone(),
        Normalization::Normalized,
    );
    debug_assert_eq!(psi.dim(), j * r * j * r_r);

    let first = if lam < 1.0 {
        let h1 = hmin_smooth(&psi, &["Ac", "Ar"], &["Rc", "Rr"], lam)?.value;
        let h2 = hmin_smooth(&out, &["B", "Rc", "Rr"], &["C"], upsilon)?.value;
        (h1 - h2 + (j as f64).log2(), iota.log2())
    } else {
        (f64::NAN, iota.log2())
    };
    let second = if lam_p < 1.0 {
        let h1 = hmin_smooth(&c_psi, &["Ac", "Ar"], &["Rc", "Rr"], lam_p)?.value;
        let h2 = hmin_smooth(&out, &["B", "Rr"], &["C", "Rc"], upsilon)?.value;
        (h1 - h2, iota.log2() + (1.0 - 2.0 * upsilon).log2())
    } else {
        (f64::NAN, iota.log2() + (1.0 - 2.0 * upsilon).log2())
    };
    Ok(ConverseReport {
        distance,
        lambda: lam,
        lambda_prime: lam_p,
        first,
        second,
        verdicts: (verdict(lam, first.0, first.1), verdict(lam_p, second.0, second.1)),
    })
}
