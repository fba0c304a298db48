use crate::ensemble::FamilyPoint;
use crate::nelder_mead::minimize;
use crate::oneshot::{capacity_lambda, capacity_lambda_prime, hmax_bits};
use crate::region::{HalfSpace, RateRegion};
use crate::{BoundsError, InputEnsemble};
use qcap_channels::ChannelRep;
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;

/// Message type and entanglement assistance of a capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    ClassicalNone,
    ClassicalUnlimited,
    QuantumNone,
    QuantumUnlimited,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::ClassicalNone => "classical/none",
            Scenario::ClassicalUnlimited => "classical/unlimited",
            Scenario::QuantumNone => "quantum/none",
            Scenario::QuantumUnlimited => "quantum/unlimited",
        }
    }

    /// The converse of the unassisted quantum capacity uses `lambda'`; the
    /// other three use `lambda`.
    fn smoothing(self, delta: f64, iota: f64) -> f64 {
        match self {
            Scenario::QuantumNone => capacity_lambda_prime(delta, iota),
            _ => capacity_lambda(delta, iota),
        }
    }

    /// Bound from `log d_S`, `H_max(S|B)` and the log of the slack term.
    fn expression(self, log_ds: f64, h: f64, log_slack: f64) -> f64 {
        match self {
            Scenario::ClassicalNone | Scenario::ClassicalUnlimited => log_ds - h + log_slack,
            Scenario::QuantumNone => -h + log_slack,
            Scenario::QuantumUnlimited => 0.5 * (log_ds - h + log_slack),
        }
    }
}

/// `delta^2/16 - sqrt(delta')/4`.
pub fn table_epsilon(delta: f64, delta_prime: f64) -> f64 {
    delta * delta / 16.0 - delta_prime.sqrt() / 4.0
}

/// `n` values `delta^4/16 * 4^{-k}` covering `(0, delta^4/16]`.
pub fn delta_prime_grid(delta: f64, n: usize) -> Vec<f64> {
    let top = delta.powi(4) / 16.0;
    (0..n).map(|k| top * 0.25f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// `(d_Sc, d_Sr)` shapes of the ensemble family; empty selects a
    /// default from the scenario and the channel input dimension.
    pub shapes: Vec<(usize, usize)>,
    /// Grid points per family parameter.
    pub grid_points: usize,
    /// Nelder-Mead iterations on the best grid cell.
    pub refine_iters: usize,
    pub delta_primes: usize,
    pub iotas: Vec<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            shapes: Vec::new(),
            grid_points: 5,
            refine_iters: 20,
            delta_primes: 4,
            iotas: vec![1.0, 0.1, 0.01, 1e-3, 1e-4],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityEstimate {
    pub scenario: Scenario,
    pub delta: f64,
    /// Heuristic lower envelope, clamped at zero.
    pub lower: f64,
    /// Largest upper expression over the evaluated ensembles; `None` when
    /// every smoothing parameter on the `iota` grid is at least 1, so the
    /// converse is vacuous.
    pub upper: Option<f64>,
    /// Ensemble and `delta'` achieving `lower`.
    pub best: FamilyPoint,
    pub delta_prime: f64,
    pub evaluations: usize,
}

fn default_shapes(scenario: Scenario, d_a: usize) -> Vec<(usize, usize)> {
    let d = d_a.min(2);
    match scenario {
        Scenario::ClassicalNone => vec![(d, 1)],
        Scenario::QuantumNone => vec![(1, d)],
        _ => vec![(1, d), (d, 1)],
    }
}

fn output_for(
    scenario: Scenario,
    ens: &InputEnsemble,
    channel: &ChannelRep,
) -> Result<qcap_linalg::DensityOperator, BoundsError> {
    match scenario {
        Scenario::ClassicalNone => ens.dephased().output(channel),
        _ => ens.output(channel),
    }
}

/// The lower expression maximized over `delta'`, before clamping. Returns
/// the value and the maximizing `delta'`.
pub fn lower_expression(
    scenario: Scenario,
    ens: &InputEnsemble,
    channel: &ChannelRep,
    delta: f64,
    delta_primes: &[f64],
) -> Result<(f64, f64), BoundsError> {
    let out = output_for(scenario, ens, channel)?;
    let log_ds = (ens.d_s() as f64).log2();
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for &dp in delta_primes {
        let eps = table_epsilon(delta, dp);
        if eps < 0.0 {
            continue;
        }
        let h = hmax_bits(&out, &["Sc", "Sr"], &["B"], eps)?;
        let v = match scenario {
            // The unassisted rows also obey d_S >= 2^rate.
            Scenario::ClassicalNone => scenario.expression(log_ds, h, (2.0 * dp).log2()).min(log_ds),
            Scenario::QuantumNone => scenario.expression(log_ds, h, dp.log2()).min(log_ds),
            _ => scenario.expression(log_ds, h, dp.log2()),
        };
        if v > best.0 {
            best = (v, dp);
        }
    }
    Ok(best)
}

/// The upper expression minimized over `iota`, or `None` when every `iota`
/// gives a smoothing parameter of at least 1.
pub fn upper_expression(
    scenario: Scenario,
    ens: &InputEnsemble,
    channel: &ChannelRep,
    delta: f64,
    iotas: &[f64],
) -> Result<Option<f64>, BoundsError> {
    let usable: Vec<(f64, f64)> = iotas
        .iter()
        .map(|&i| (i, scenario.smoothing(delta, i)))
        .filter(|&(i, l)| i > 0.0 && i <= 1.0 && l < 1.0)
        .collect();
    if usable.is_empty() {
        return Ok(None);
    }
    let out = output_for(scenario, ens, channel)?;
    let log_ds = (ens.d_s() as f64).log2();
    let mut best = f64::INFINITY;
    for (iota, lam) in usable {
        let h = hmax_bits(&out, &["Sc", "Sr"], &["B"], lam)?;
        best = best.min(scenario.expression(log_ds, h, -iota.log2()));
    }
    Ok(Some(best))
}

/// Estimates the one-shot capacity of `scenario` at error `delta`:
/// a 2-parameter grid over the ensemble family per shape, Nelder-Mead
/// refinement from the best grid point, and the upper expression on the
/// grid ensembles.
pub fn capacity_estimate(
    channel: &ChannelRep,
    scenario: Scenario,
    delta: f64,
    cfg: &SearchConfig,
) -> Result<CapacityEstimate, BoundsError> {
    if !(delta > 0.0 && delta <= 2.0) {
        return Err(BoundsError::Precondition(format!("delta = {delta} outside (0, 2]")));
    }
    let d_a = channel.d_in();
    let shapes = if cfg.shapes.is_empty() { default_shapes(scenario, d_a) } else { cfg.shapes.clone() };
    let dps = delta_prime_grid(delta, cfg.delta_primes.max(1));
    let g = cfg.grid_points.max(2);
    let axis = |k: usize, hi: f64| hi * k as f64 / (g - 1) as f64;
    let points: Vec<FamilyPoint> = shapes
        .iter()
        .flat_map(|&(d_c, d_r)| {
            (0..g).flat_map(move |i| {
                (0..g).map(move |j| FamilyPoint {
                    d_c,
                    d_r,
                    p: axis(i, 1.0),
                    theta: axis(j, FRAC_PI_2),
                })
            })
        })
        .collect();
    let evals: Vec<(FamilyPoint, f64, f64, Option<f64>)> = points
        .par_iter()
        .map(|fp| {
            let ens = fp.ensemble(d_a)?;
            let (v, dp) = lower_expression(scenario, &ens, channel, delta, &dps)?;
            let up = upper_expression(scenario, &ens, channel, delta, &cfg.iotas)?;
            Ok((*fp, v, dp, up))
        })
        .collect::<Result<_, BoundsError>>()?;
    let mut evaluations = evals.len();
    let (mut best, mut lower, mut best_dp, _) = evals
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    let upper = evals.iter().filter_map(|e| e.3).fold(None, |acc: Option<f64>, u| Some(acc.map_or(u, |a| a.max(u))));

    if cfg.refine_iters > 0 {
        let shape = (best.d_c, best.d_r);
        let eval = |x: &[f64]| -> Option<(f64, f64)> {
            let fp = FamilyPoint {
                d_c: shape.0,
                d_r: shape.1,
                p: x[0].clamp(0.0, 1.0),
                theta: x[1],
            };
            let ens = fp.ensemble(d_a).ok()?;
            lower_expression(scenario, &ens, channel, delta, &dps).ok()
        };
        let f = |x: &[f64]| eval(x).map_or(f64::INFINITY, |v| -v.0);
        let step = [1.0 / (g - 1) as f64, FRAC_PI_2 / (g - 1) as f64];
        let (x, v) = minimize(&f, &[best.p, best.theta], &step, cfg.refine_iters, 1e-9);
        evaluations += cfg.refine_iters;
        if -v > lower {
            best = FamilyPoint {
                p: x[0].clamp(0.0, 1.0),
                theta: x[1],
                ..best
            };
            lower = -v;
            best_dp = eval(&x).map_or(best_dp, |r| r.1);
        }
    }
    Ok(CapacityEstimate {
        scenario,
        delta,
        lower: lower.max(0.0),
        upper: upper.map(|u| u.max(0.0)),
        best,
        delta_prime: best_dp,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    pub delta_primes: usize,
    pub iotas: Vec<f64>,
}

impl Default for RegionGrid {
    fn default() -> Self {
        Self {
            delta_primes: 3,
            iotas: vec![1.0, 0.1, 0.01, 1e-3],
        }
    }
}

/// Inner polygons (one per ensemble and `delta'`) and outer polygons (one
/// per ensemble, intersected over `iota`) in the `(c, q)` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct SimultaneousRegion {
    pub delta: f64,
    pub inner: Vec<RateRegion>,
    pub outer: Vec<RateRegion>,
    /// `delta'` values skipped because the smoothing parameter was negative.
    pub skipped: Vec<f64>,
}

impl SimultaneousRegion {
    pub fn inner_contains(&self, x: &[f64], tol: f64) -> bool {
        self.inner.iter().any(|r| r.contains(x, tol))
    }

    pub fn outer_contains(&self, x: &[f64], tol: f64) -> bool {
        self.outer.iter().any(|r| r.contains(x, tol))
    }

    /// Vertices of the inner union: polygon vertices not strictly inside
    /// another polygon, sorted and deduplicated.
    pub fn inner_vertices(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for (i, r) in self.inner.iter().enumerate() {
            for v in &r.vertices {
                let interior = self
                    .inner
                    .iter()
                    .enumerate()
                    .any(|(k, o)| k != i && o.max_violation(v) < -1e-9);
                if !interior && !out.iter().any(|w| w.iter().zip(v).all(|(a, b)| (a - b).abs() < 1e-9)) {
                    out.push(v.clone());
                }
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        out
    }
}

/// Builds the inner and outer simultaneous-transmission regions of
/// `channel` at error `delta` over `family`. Offsets are clamped at zero
/// since `(0, 0)` is always achievable.
pub fn simultaneous_region(
    channel: &ChannelRep,
    delta: f64,
    family: &[InputEnsemble],
    grid: &RegionGrid,
) -> Result<SimultaneousRegion, BoundsError> {
    if !(delta > 0.0 && delta <= 2.0) {
        return Err(BoundsError::Precondition(format!("delta = {delta} outside (0, 2]")));
    }
    let dps = delta_prime_grid(delta, grid.delta_primes.max(1));
    let skipped: Vec<f64> = dps.iter().copied().filter(|&dp| table_epsilon(delta, dp) < 0.0).collect();
    let per_rho: Vec<(Vec<RateRegion>, RateRegion)> = family
        .par_iter()
        .enumerate()
        .map(|(i, ens)| {
            ens.require_mixed()?;
            let out = ens.output(channel)?;
            let (d_c, d_r) = (ens.d_c(), ens.d_r());
            let (lc, lr) = ((d_c as f64).log2(), (d_r as f64).log2());
            let mut inner = Vec::new();
            for &dp in &dps {
                let eps = table_epsilon(delta, dp);
                if eps < 0.0 {
                    continue;
                }
                let mut hs = Vec::new();
                if d_c >= 2 {
                    let h = hmax_bits(&out, &["Sc", "Sr"], &["B"], eps)?;
                    let b = -h + ((d_c - 1) as f64).log2() + dp.log2();
                    hs.push(HalfSpace::new(vec![1.0, 1.0], b.max(0.0), "c+q"));
                    hs.push(HalfSpace::new(vec![1.0, 0.0], lc, "c <= log d_Sc"));
                } else {
                    hs.push(HalfSpace::new(vec![1.0, 0.0], 0.0, "c <= log d_Sc"));
                }
                if d_r >= 2 {
                    let h = hmax_bits(&out, &["Sr"], &["B", "Sc"], eps)?;
                    let b = -h + (dp * (1.0 - 2.0 * eps)).log2();
                    hs.push(HalfSpace::new(vec![0.0, 1.0], b.max(0.0), "q"));
                }
                hs.push(HalfSpace::new(vec![0.0, 1.0], lr, "q <= log d_Sr"));
                inner.push(RateRegion::new(format!("inner rho{i} delta'={dp:e}"), &["c", "q"], hs));
            }
            let mut hs = vec![HalfSpace::new(vec![0.0, 1.0], lr, "q <= log d_Sr")];
            for &iota in &grid.iotas {
                let lam = capacity_lambda(delta, iota);
                if lam < 1.0 {
                    let h = hmax_bits(&out, &["Sc", "Sr"], &["B"], lam)?;
                    let b = -h + lc - iota.log2();
                    hs.push(HalfSpace::new(vec![1.0, 1.0], b.max(0.0), format!("c+q iota={iota:e}")));
                }
                let lam_p = capacity_lambda_prime(delta, iota);
                if lam_p < 1.0 {
                    let h = hmax_bits(&out, &["Sr"], &["B", "Sc"], lam_p)?;
                    let b = -h - iota.log2();
                    hs.push(HalfSpace::new(vec![0.0, 1.0], b.max(0.0), format!("q iota={iota:e}")));
                }
            }
            Ok((inner, RateRegion::new(format!("outer rho{i}"), &["c", "q"], hs)))
        })
        .collect::<Result<_, BoundsError>>()?;
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for (i, o) in per_rho {
        inner.extend(i);
        outer.push(o);
    }
    Ok(SimultaneousRegion {
        delta,
        inner,
        outer,
        skipped,
    })
}
