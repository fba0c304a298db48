use crate::{BoundsError, CodeParams, InputEnsemble};
use qcap_channels::ChannelRep;
use qcap_entropies::{hmax_smooth, SolveStatus};
use qcap_linalg::DensityOperator;

/// Slack below which an inequality still counts as satisfied; absorbs the
/// solver's accuracy on entropies.
pub const FEAS_TOL: f64 = 1e-6;

/// Smoothing and slack parameters consumed by the one-shot theorems. Each
/// theorem reads only the fields it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingBudget {
    pub epsilon: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta_prime: f64,
    pub iota: f64,
}

impl Default for SmoothingBudget {
    fn default() -> Self {
        Self {
            epsilon: 0.0,
            delta1: 1.0,
            delta2: 1.0,
            delta_prime: 1.0,
            iota: 1.0,
        }
    }
}

impl SmoothingBudget {
    fn check(&self) -> Result<(), BoundsError> {
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(BoundsError::Precondition(format!("epsilon = {} outside [0, 1)", self.epsilon)));
        }
        if !(self.iota > 0.0 && self.iota <= 1.0) {
            return Err(BoundsError::Precondition(format!("iota = {} outside (0, 1]", self.iota)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectReport {
    pub feasible: bool,
    pub achieved_error: f64,
    /// Right minus left side of `q+e <= log d_Sr`, the classical
    /// inequality and the quantum inequality; `None` where a degenerate case
    /// removes the inequality.
    pub slacks: [Option<f64>; 3],
    /// `d_Sc >= 2^c`, or `c = 0` when `d_Sc = 1`.
    pub dimension_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConverseReport {
    pub holds: bool,
    pub lambda: f64,
    pub lambda_prime: f64,
    /// Some smoothing parameter reached 1 and its inequality was dropped.
    pub saturated: bool,
    /// `None` for an inequality made vacuous by saturation.
    pub slacks: [Option<f64>; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnlimitedReport {
    /// Feasible for the direct check, holding for the converse one.
    pub ok: bool,
    /// Error of the code for the direct check, smoothing parameter for the
    /// converse one.
    pub parameter: f64,
    pub saturated: bool,
    pub slack: Option<f64>,
}

/// `x = 2 delta^{1/8}`.
fn x_of(delta: f64) -> f64 {
    2.0 * delta.max(0.0).powf(0.125)
}

/// Smoothing parameter of the classical converse inequality.
pub fn capacity_lambda(delta: f64, iota: f64) -> f64 {
    let x = x_of(delta);
    2.0 * (iota + 2.0 * x * x).sqrt() + x + 2.0 * x * x
}

/// Smoothing parameter of the quantum converse inequality.
pub fn capacity_lambda_prime(delta: f64, iota: f64) -> f64 {
    let x = x_of(delta);
    (4.0 * (iota + 2.0 * x).sqrt() + 2.0 * x.sqrt() + (4.0 * (iota + 8.0).sqrt() + 24.0) * x).sqrt()
}

/// `2 sqrt(sqrt(d1) + sqrt(d2) + 4 eps)`.
pub fn direct_error(delta1: f64, delta2: f64, epsilon: f64) -> f64 {
    2.0 * (delta1.sqrt() + delta2.sqrt() + 4.0 * epsilon).sqrt()
}

/// Smooth max-entropy in bits, failing on an infeasible solve.
pub(crate) fn hmax_bits(
    state: &DensityOperator,
    a: &[&str],
    b: &[&str],
    eps: f64,
) -> Result<f64, BoundsError> {
    let r = hmax_smooth(state, a, b, eps)?;
    if r.status == SolveStatus::Infeasible {
        return Err(BoundsError::Solver(format!("H_max^{eps}({}|{})", a.join(""), b.join(""))));
    }
    Ok(r.value)
}

/// `(H_max^eps(S|B), H_max^eps(S_r|B S_c))` of `N(rho)`, skipping the ones a
/// degenerate case does not need (reported as NaN).
pub(crate) fn direct_entropies(
    out: &DensityOperator,
    eps: f64,
    need: (bool, bool),
) -> Result<(f64, f64), BoundsError> {
    let h1 = if need.0 { hmax_bits(out, &["Sc", "Sr"], &["B"], eps)? } else { f64::NAN };
    let h2 = if need.1 { hmax_bits(out, &["Sr"], &["B", "Sc"], eps)? } else { f64::NAN };
    Ok((h1, h2))
}

/// Which of the classical and quantum inequalities apply to `code` on
/// `ens`.
fn direct_branches(ens: &InputEnsemble, code: &CodeParams) -> (bool, bool) {
    let classical = !(code.c == 0.0 && ens.d_c() == 1);
    let quantum = !(code.q == 0.0 && code.e == 0.0 && ens.d_r() == 1);
    (classical, quantum)
}

fn assemble_direct(
    ens: &InputEnsemble,
    code: &CodeParams,
    budget: &SmoothingBudget,
    h: (f64, f64),
) -> DirectReport {
    let (classical, quantum) = direct_branches(ens, code);
    let (d_c, d_r) = (ens.d_c() as f64, ens.d_r() as f64);
    let s1 = d_r.log2() - code.q - code.e;
    let s2 = classical.then(|| -h.0 + (d_c - 1.0).log2() + budget.delta1.log2() - (code.c + code.q - code.e));
    let s3 = quantum.then(|| -h.1 + budget.delta2.log2() - (code.q - code.e));
    let dimension_ok = if ens.d_c() == 1 { code.c == 0.0 } else { d_c.log2() >= code.c };
    let slacks = [Some(s1), s2, s3];
    let feasible = dimension_ok && slacks.iter().flatten().all(|s| *s >= -FEAS_TOL);
    let achieved_error = direct_error(
        if classical { budget.delta1 } else { 0.0 },
        if quantum { budget.delta2 } else { 0.0 },
        budget.epsilon,
    );
    DirectReport {
        feasible,
        achieved_error,
        slacks,
        dimension_ok,
    }
}

/// Evaluates the sufficient condition of the direct coding theorem for
/// `code` with the given `ens` and `budget`. Uses `epsilon`, `delta1`,
/// `delta2`.
pub fn direct_feasible(
    ens: &InputEnsemble,
    channel: &ChannelRep,
    code: &CodeParams,
    budget: &SmoothingBudget,
) -> Result<DirectReport, BoundsError> {
    budget.check()?;
    ens.require_mixed()?;
    let need = direct_branches(ens, code);
    if (need.0 && budget.delta1 <= 0.0) || (need.1 && budget.delta2 <= 0.0) {
        return Err(BoundsError::Precondition("delta1 and delta2 must be positive".into()));
    }
    let out = ens.output(channel)?;
    let h = direct_entropies(&out, budget.epsilon, need)?;
    Ok(assemble_direct(ens, code, budget, h))
}

/// Searches `eps_grid` and the split of the remaining error between
/// `delta1` and `delta2` for a budget whose error is at most `code.delta`
/// and under which `code` is feasible. For each `eps` the split is exact:
/// the smallest admissible `delta_i` are computed and the leftover budget
/// is shared in proportion. Returns the first success, or the report at
/// the last `eps` tried when none succeeds.
pub fn best_direct_budget(
    ens: &InputEnsemble,
    channel: &ChannelRep,
    code: &CodeParams,
    eps_grid: &[f64],
) -> Result<(SmoothingBudget, DirectReport), BoundsError> {
    ens.require_mixed()?;
    let out = ens.output(channel)?;
    let need = direct_branches(ens, code);
    let (d_c, _) = (ens.d_c() as f64, ens.d_r());
    let total = code.delta * code.delta / 4.0;
    let mut last = None;
    for &eps in eps_grid {
        let room = total - 4.0 * eps;
        if !(0.0..1.0).contains(&eps) || room <= 0.0 {
            continue;
        }
        let h = direct_entropies(&out, eps, need)?;
        // Smallest delta_i turning each inequality into an equality.
        let t1 = if need.0 { (code.c + code.q - code.e + h.0 - (d_c - 1.0).log2()).exp2() } else { 0.0 };
        let t2 = if need.1 { (code.q - code.e + h.1).exp2() } else { 0.0 };
        let used = t1.sqrt() + t2.sqrt();
        let (delta1, delta2) = if used > 0.0 && used <= room {
            let k = room / used;
            (t1 * k * k, t2 * k * k)
        } else {
            // Either nothing is needed or the budget is too small; split evenly.
            let share = if need.0 && need.1 { room / 2.0 } else { room };
            (share * share, share * share)
        };
        let budget = SmoothingBudget {
            epsilon: eps,
            delta1: if need.0 { delta1 } else { 1.0 },
            delta2: if need.1 { delta2 } else { 1.0 },
            ..SmoothingBudget::default()
        };
        let report = assemble_direct(ens, code, &budget, h);
        if report.feasible {
            return Ok((budget, report));
        }
        last = Some((budget, report));
    }
    last.ok_or_else(|| BoundsError::Precondition(format!("no epsilon in the grid fits delta = {}", code.delta)))
}

/// Evaluates the three necessary conditions of the converse theorem for
/// `code` (with error `code.delta`) on `ens` at the given `iota`.
pub fn converse_holds(
    ens: &InputEnsemble,
    channel: &ChannelRep,
    code: &CodeParams,
    iota: f64,
) -> Result<ConverseReport, BoundsError> {
    SmoothingBudget {
        iota,
        ..SmoothingBudget::default()
    }
    .check()?;
    ens.require_mixed()?;
    let lam = capacity_lambda(code.delta, iota);
    let lam_p = capacity_lambda_prime(code.delta, iota);
    let out = ens.output(channel)?;
    let (d_c, d_r) = (ens.d_c() as f64, ens.d_r() as f64);
    let s1 = d_r.log2() - code.q - code.e;
    let s2 = if lam < 1.0 {
        let h = hmax_bits(&out, &["Sc", "Sr"], &["B"], lam)?;
        Some(-h + d_c.log2() - iota.log2() - (code.c + code.q - code.e))
    } else {
        None
    };
    let s3 = if lam_p < 1.0 {
        let h = hmax_bits(&out, &["Sr"], &["B", "Sc"], lam_p)?;
        Some(-h - iota.log2() - (code.q - code.e))
    } else {
        None
    };
    let slacks = [Some(s1), s2, s3];
    Ok(ConverseReport {
        holds: slacks.iter().flatten().all(|s| *s >= -FEAS_TOL),
        lambda: lam,
        lambda_prime: lam_p,
        saturated: lam >= 1.0 || lam_p >= 1.0,
        slacks,
    })
}

/// Entanglement-assisted direct condition `c + 2q <= log d_S - H_max^eps(S|B)
/// + log delta'`. Uses `epsilon` and `delta_prime`.
pub fn unlimited_direct(
    ens: &InputEnsemble,
    channel: &ChannelRep,
    cq: (f64, f64),
    budget: &SmoothingBudget,
) -> Result<UnlimitedReport, BoundsError> {
    let (eps, dp) = (budget.epsilon, budget.delta_prime);
    if !(0.0..0.5).contains(&eps) || !(dp > 0.0 && dp <= 1.0 - 2.0 * eps) {
        return Err(BoundsError::Precondition(format!(
            "need epsilon in [0, 1/2) and delta' in (0, 1 - 2 epsilon], got {eps}, {dp}"
        )));
    }
    ens.require_mixed()?;
    let out = ens.output(channel)?;
    let h = hmax_bits(&out, &["Sc", "Sr"], &["B"], eps)?;
    let slack = (ens.d_s() as f64).log2() - h + dp.log2() - (cq.0 + 2.0 * cq.1);
    Ok(UnlimitedReport {
        ok: slack >= -FEAS_TOL,
        parameter: 2.0 * ((2.0 * dp).sqrt() + dp.sqrt() + 4.0 * eps).sqrt(),
        saturated: false,
        slack: Some(slack),
    })
}

/// Entanglement-assisted converse condition `c + 2q <= log d_S -
/// H_max^lambda(S|B) - log iota`.
pub fn unlimited_converse(
    ens: &InputEnsemble,
    channel: &ChannelRep,
    cq: (f64, f64),
    iota: f64,
    delta: f64,
) -> Result<UnlimitedReport, BoundsError> {
    SmoothingBudget {
        iota,
        ..SmoothingBudget::default()
    }
    .check()?;
    ens.require_mixed()?;
    let lam = capacity_lambda(delta, iota);
    if lam >= 1.0 {
        return Ok(UnlimitedReport {
            ok: true,
            parameter: lam,
            saturated: true,
            slack: None,
        });
    }
    let out = ens.output(channel)?;
    let h = hmax_bits(&out, &["Sc", "Sr"], &["B"], lam)?;
    let slack = (ens.d_s() as f64).log2() - h - iota.log2() - (cq.0 + 2.0 * cq.1);
    Ok(UnlimitedReport {
        ok: slack >= -FEAS_TOL,
        parameter: lam,
        saturated: false,
        slack: Some(slack),
    })
}
