use crate::args::*;
use crate::error::CliError;
use crate::report::{nums, num, opt_num, RunReport};
use crate::input::{load, parse_channel, parse_instance, parse_state, Loaded};
use qcap_asymptotic::{region_union, RateRegion, AXES};
use qcap_bounds::{
    best_direct_budget, converse_holds, direct_feasible, simultaneous_region, unlimited_converse,
    unlimited_direct, CodeParams, FamilyPoint, InputEnsemble, RegionGrid, SmoothingBudget,
};
use qcap_channels::{ChannelKind, ChannelRep, TraceFlag};
use qcap_decoupling::verify_direct_theorem;
use qcap_entropies::{
    hmax_with, hmax_smooth_with, hmin_with, hmin_smooth_with, von_neumann, von_neumann_cond, SmoothEntropyResult,
    SolveStatus, SolverSettings,
};
use qcap_linalg::{c64, eigh, max_abs, CMat};
use serde_json::{json, Value};
use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

/// What a command produced: the report for stdout, files to write, and the
/// exit code.
pub struct Outcome {
    pub report: RunReport,
    pub files: Vec<(PathBuf, String)>,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(report: RunReport) -> Self {
        Self { report, files: Vec::new(), exit_code: 0 }
    }
}

pub fn solver_settings() -> Result<SolverSettings, CliError> {
    match std::env::var(qcap_entropies::sdp::TOL_ENV) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(SolverSettings::from_env()),
            _ => Err(CliError::input(format!("{} = `{s}` is not a positive number", qcap_entropies::sdp::TOL_ENV))),
        },
        Err(_) => Ok(SolverSettings::default()),
    }
}

fn load_channel(path: &Path) -> Result<(ChannelRep, Loaded), CliError> {
    let loaded = load(path)?;
    let ch = parse_channel(&loaded.value).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok((ch, loaded))
}

fn require_tp(ch: &ChannelRep) -> Result<(), CliError> {
    if ch.trace_flag() != TraceFlag::TracePreserving {
        return Err(CliError::input("channel is not trace preserving"));
    }
    Ok(())
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::NearOptimal => "near-optimal",
        SolveStatus::Infeasible => "infeasible",
    }
}

pub fn entropy(args: &EntropyArgs) -> Result<Outcome, CliError> {
    let smooth = matches!(args.which, Which::HminSmooth | Which::HmaxSmooth);
    if !(0.0..1.0).contains(&args.eps) {
        return Err(CliError::input(format!("--eps {} outside [0, 1)", args.eps)));
    }
    if !smooth && args.eps != 0.0 {
        return Err(CliError::input(format!("--eps applies to the smooth entropies only, not {}", args.which.name())));
    }
    let settings = solver_settings()?;
    let state_file = load(&args.state)?;
    let mut rho = parse_state(&state_file.value).map_err(|e| CliError::input(format!("{}: {e}", args.state.display())))?;
    let mut inputs = vec![state_file.raw];
    if let Some(p) = &args.channel {
        let (ch, loaded) = load_channel(p)?;
        require_tp(&ch)?;
        rho = ch.apply(&rho).map_err(|e| {
            CliError::input(format!("{e} (the channel's `input` and `output` labels are set in its file)"))
        })?;
        inputs.push(loaded.raw);
    }
    let labels: Vec<String> = rho.layout().labels().iter().map(|s| s.to_string()).collect();
    let a: Vec<String> = if args.a.is_empty() { vec![labels[0].clone()] } else { args.a.clone() };
    let b: Vec<String> = if args.b.is_empty() {
        labels.iter().filter(|l| !a.contains(l)).cloned().collect()
    } else {
        args.b.clone()
    };
    for l in a.iter().chain(&b) {
        if !labels.contains(l) {
            return Err(CliError::input(format!("unknown system `{l}`; the state has {labels:?}")));
        }
    }
    if a.iter().any(|l| b.contains(l)) {
        return Err(CliError::input("--a and --b overlap"));
    }
    let ar: Vec<&str> = a.iter().map(String::as_str).collect();
    let br: Vec<&str> = b.iter().map(String::as_str).collect();
    let smoothed = |r: SmoothEntropyResult| -> Result<Value, CliError> {
        if r.status == SolveStatus::Infeasible {
            return Err(CliError::Solver(format!("{} did not converge", args.which.name())));
        }
        Ok(json!({"value": num(r.value), "status": status_name(r.status), "duality_gap": num(r.duality_gap)}))
    };
    let results = match args.which {
        Which::Hmin => smoothed(hmin_with(&rho, &ar, &br, &settings)?)?,
        Which::Hmax => smoothed(hmax_with(&rho, &ar, &br, &settings)?)?,
        Which::HminSmooth => smoothed(hmin_smooth_with(&rho, &ar, &br, args.eps, &settings)?)?,
        Which::HmaxSmooth => smoothed(hmax_smooth_with(&rho, &ar, &br, args.eps, &settings)?)?,
        Which::Vn => {
            let v = if br.is_empty() { von_neumann(&rho, &ar)? } else { von_neumann_cond(&rho, &ar, &br)? };
            json!({"value": num(v), "status": "exact", "duality_gap": 0.0})
        }
    };
    let mut config = json!({
        "state": path_str(&args.state),
        "which": args.which.name(),
        "eps": args.eps,
        "a": a,
        "b": b,
        "solver_gap_tol": settings.gap_tol,
    });
    if let Some(p) = &args.channel {
        config["channel"] = json!(path_str(p));
    }
    Ok(Outcome::ok(RunReport { command: "entropy".into(), config, inputs, seed: None, results }))
}

/// `(1/d) sum_j |j><j|_Sc x |j><j|_A` with trivial `S_r`.
fn classical_source(d: usize) -> Result<InputEnsemble, CliError> {
    let blocks: Vec<CMat> = (0..d)
        .map(|j| {
            let mut m = CMat::zeros(d, d);
            m[(j, j)] = c64(1.0, 0.0);
            m
        })
        .collect();
    Ok(InputEnsemble::from_blocks(&blocks, 1)?)
}

fn family_point(v: &[f64]) -> Result<FamilyPoint, CliError> {
    if v.len() != 4 {
        return Err(CliError::input(format!("--family takes d_c,d_r,p,theta; got {} values", v.len())));
    }
    let as_dim = |x: f64, name: &str| -> Result<usize, CliError> {
        if x >= 1.0 && x.fract() == 0.0 {
            Ok(x as usize)
        } else {
            Err(CliError::input(format!("--family {name} = {x} is not a positive integer")))
        }
    };
    Ok(FamilyPoint { d_c: as_dim(v[0], "d_c")?, d_r: as_dim(v[1], "d_r")?, p: v[2], theta: v[3] })
}

/// The source ensemble and a description of it for the config echo.
fn ensemble(src: &SourceArgs, d_a: usize, inputs: &mut Vec<String>) -> Result<(InputEnsemble, Value), CliError> {
    if let Some(p) = &src.state {
        let loaded = load(p)?;
        let rho = parse_state(&loaded.value).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
        let labels = rho.layout().labels();
        if labels != ["Sc", "Sr", "A"] {
            return Err(CliError::input(format!("source systems must be [Sc, Sr, A], found {labels:?}")));
        }
        let dims = rho.layout().dims();
        inputs.push(loaded.raw);
        let ens = InputEnsemble::new(rho.matrix().clone(), dims[0], dims[1])?;
        return Ok((ens, json!({"state": path_str(p)})));
    }
    if let Some(f) = &src.family {
        let fp = family_point(f)?;
        return Ok((fp.ensemble(d_a)?, json!({"family": [fp.d_c, fp.d_r, fp.p, fp.theta]})));
    }
    match src.source.unwrap_or(Source::Phi) {
        Source::Phi => Ok((InputEnsemble::maximally_entangled(d_a), json!("phi"))),
        Source::Classical => Ok((classical_source(d_a)?, json!("classical"))),
    }
}

fn slacks(s: &[Option<f64>]) -> Value {
    Value::Array(s.iter().map(|&x| opt_num(x)).collect())
}

pub fn bound(args: &BoundArgs) -> Result<Outcome, CliError> {
    if args.code.len() != 3 {
        return Err(CliError::input(format!("--code takes c,q,e; got {} values", args.code.len())));
    }
    let (c, q, e) = (args.code[0], args.code[1], args.code[2]);
    let code = CodeParams::new(c, q, e, args.delta)?;
    if !(args.iota > 0.0 && args.iota <= 1.0) {
        return Err(CliError::input(format!("--iota {} outside (0, 1]", args.iota)));
    }
    let unlimited = matches!(args.mode, BoundMode::UnlimitedDirect | BoundMode::UnlimitedConverse);
    if unlimited && e != 0.0 {
        return Err(CliError::input("unlimited-assistance modes take e = 0"));
    }
    let explicit = args.eps.is_some() || args.delta1.is_some() || args.delta2.is_some();
    if args.mode == BoundMode::Direct && !explicit && args.grid == 0 {
        return Err(CliError::input("--grid must be positive"));
    }
    solver_settings()?;
    let (ch, loaded) = load_channel(&args.channel)?;
    require_tp(&ch)?;
    let mut inputs = vec![loaded.raw];
    let (ens, source) = ensemble(&args.source, ch.d_in(), &mut inputs)?;
    let mut config = json!({
        "channel": path_str(&args.channel),
        "mode": args.mode.name(),
        "code": [c, q, e],
        "delta": args.delta,
        "source": source,
    });
    let results = match args.mode {
        BoundMode::Direct => {
            let (budget, rep) = if explicit {
                let budget = SmoothingBudget {
                    epsilon: args.eps.unwrap_or(0.0),
                    delta1: args.delta1.unwrap_or(1.0),
                    delta2: args.delta2.unwrap_or(1.0),
                    ..SmoothingBudget::default()
                };
                (budget, direct_feasible(&ens, &ch, &code, &budget)?)
            } else {
                let top = args.delta * args.delta / 16.0;
                let grid: Vec<f64> = (0..args.grid).map(|k| top * k as f64 / args.grid as f64).collect();
                config["grid"] = json!(args.grid);
                best_direct_budget(&ens, &ch, &code, &grid)?
            };
            let within = rep.achieved_error <= args.delta + 1e-12;
            json!({
                "feasible": rep.feasible && within,
                "conditions_hold": rep.feasible,
                "achieved_error": num(rep.achieved_error),
                "error_within_delta": within,
                "dimension_ok": rep.dimension_ok,
                "slacks": slacks(&rep.slacks),
                "budget": {"epsilon": num(budget.epsilon), "delta1": num(budget.delta1), "delta2": num(budget.delta2)},
                "budget_search": !explicit,
            })
        }
        BoundMode::Converse => {
            config["iota"] = json!(args.iota);
            let rep = converse_holds(&ens, &ch, &code, args.iota)?;
            json!({
                "holds": rep.holds,
                "lambda": num(rep.lambda),
                "lambda_prime": num(rep.lambda_prime),
                "saturated": rep.saturated,
                "slacks": slacks(&rep.slacks),
            })
        }
        BoundMode::UnlimitedDirect => {
            let eps = args.eps.unwrap_or(0.0);
            let dp = match args.delta_prime {
                Some(dp) => dp,
                None => {
                    // Largest delta' whose error 2 sqrt(sqrt(2 d') + sqrt(d') + 4 eps) is at most delta.
                    let room = args.delta * args.delta / 4.0 - 4.0 * eps;
                    if room <= 0.0 {
                        return Err(CliError::input(format!("delta = {} leaves no room for eps = {eps}", args.delta)));
                    }
                    (room / (1.0 + 2f64.sqrt())).powi(2).min(1.0 - 2.0 * eps)
                }
            };
            config["eps"] = json!(eps);
            config["delta_prime"] = json!(dp);
            let budget = SmoothingBudget { epsilon: eps, delta_prime: dp, ..SmoothingBudget::default() };
            let rep = unlimited_direct(&ens, &ch, (c, q), &budget)?;
            let within = rep.parameter <= args.delta + 1e-12;
            json!({
                "feasible": rep.ok && within,
                "conditions_hold": rep.ok,
                "achieved_error": num(rep.parameter),
                "error_within_delta": within,
                "slack": opt_num(rep.slack),
            })
        }
        BoundMode::UnlimitedConverse => {
            config["iota"] = json!(args.iota);
            let rep = unlimited_converse(&ens, &ch, (c, q), args.iota, args.delta)?;
            json!({
                "holds": rep.ok,
                "lambda": num(rep.parameter),
                "saturated": rep.saturated,
                "slack": opt_num(rep.slack),
            })
        }
    };
    Ok(Outcome::ok(RunReport { command: "bound".into(), config, inputs, seed: None, results }))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Grid over the ensemble family with shapes `(1, d)`, `(d, 1)`, `(d, d)`.
fn family_grid(d_a: usize, grid: usize) -> Result<Vec<InputEnsemble>, CliError> {
    if d_a < 2 {
        return Err(CliError::input("region needs a channel input of dimension at least 2"));
    }
    let d = d_a.min(2);
    let mut out = Vec::new();
    for (d_c, d_r) in [(1, d), (d, 1), (d, d)] {
        let thetas = if d_c == 1 { vec![0.0] } else { linspace(0.0, FRAC_PI_2, grid) };
        for &p in &linspace(0.0, 1.0, grid) {
            for &theta in &thetas {
                out.push(FamilyPoint { d_c, d_r, p, theta }.ensemble(d_a)?);
            }
        }
    }
    Ok(out)
}

fn csv_field(x: f64) -> String {
    let r = crate::report::round_sig(x);
    format!("{r}")
}

fn region_json(r: &RateRegion) -> Value {
    json!({
        "label": r.label,
        "axes": r.axes,
        "inequalities": r.inequalities.iter().map(|h| json!({
            "name": h.name,
            "normal": nums(&h.normal),
            "offset": num(h.offset),
        })).collect::<Vec<_>>(),
        "vertex_count": r.vertices.len(),
    })
}

/// Vertices of a polygon ordered counterclockwise around their centroid.
fn polygon_order(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if vs.len() < 3 {
        return vs.to_vec();
    }
    let n = vs.len() as f64;
    let (cx, cy) = (vs.iter().map(|v| v[0]).sum::<f64>() / n, vs.iter().map(|v| v[1]).sum::<f64>() / n);
    let mut out = vs.to_vec();
    out.sort_by(|a, b| (a[1] - cy).atan2(a[0] - cx).total_cmp(&(b[1] - cy).atan2(b[0] - cx)));
    out
}

fn write_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Internal(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn polygons_csv(regions: &[RateRegion]) -> Result<String, CliError> {
    let mut rows = Vec::new();
    for (i, r) in regions.iter().enumerate() {
        for v in polygon_order(&r.vertices) {
            rows.push(vec![i.to_string(), csv_field(v[0]), csv_field(v[1])]);
        }
    }
    write_csv(&["polygon", "c", "q"], &rows)
}

/// `out` without a trailing `.csv`, to which suffixes are appended.
fn stem(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "csv") {
        out.with_extension("")
    } else {
        out.to_path_buf()
    }
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn region(args: &RegionArgs) -> Result<Outcome, CliError> {
    if args.grid == 0 {
        return Err(CliError::input("--grid must be positive"));
    }
    if args.mode == RegionMode::Oneshot {
        match args.delta {
            Some(d) if d > 0.0 && d <= 2.0 => {}
            Some(d) => return Err(CliError::input(format!("--delta {d} outside (0, 2]"))),
            None => return Err(CliError::input("--delta is required for one-shot regions")),
        }
    }
    if args.mode == RegionMode::Asymptotic && !(1..=2).contains(&args.copies) {
        return Err(CliError::input(format!("--copies {} not in 1..=2", args.copies)));
    }
    solver_settings()?;
    let (ch, loaded) = load_channel(&args.channel)?;
    require_tp(&ch)?;
    let family = family_grid(ch.d_in(), args.grid)?;
    let stem = stem(&args.out);
    let mut config = json!({
        "channel": path_str(&args.channel),
        "grid": args.grid,
        "out": path_str(&args.out),
    });
    let mut files = Vec::new();
    let results = match args.mode {
        RegionMode::Asymptotic => {
            config["mode"] = json!("asymptotic");
            config["copies"] = json!(args.copies);
            let union = region_union(&ch, &family, args.copies)?;
            let rows: Vec<Vec<String>> = union.vertices.iter().map(|v| v.iter().map(|&x| csv_field(x)).collect()).collect();
            let csv_path = with_suffix(&stem, ".csv");
            let json_path = with_suffix(&stem, ".json");
            files.push((csv_path.clone(), write_csv(&AXES, &rows)?));
            files.push((json_path.clone(), crate::report::to_string(&json!({"regions": [region_json(&union)]})) + "\n"));
            json!({
                "ensembles": family.len(),
                "vertex_count": union.vertices.len(),
                "vertices": union.vertices.iter().map(|v| nums(v)).collect::<Vec<_>>(),
                "files": [path_str(&csv_path), path_str(&json_path)],
            })
        }
        RegionMode::Oneshot => {
            let delta = args.delta.expect("checked above");
            config["mode"] = json!("oneshot");
            config["delta"] = json!(delta);
            let grid = RegionGrid::default();
            config["delta_primes"] = json!(grid.delta_primes);
            config["iotas"] = nums(&grid.iotas);
            let reg = simultaneous_region(&ch, delta, &family, &grid)?;
            let violation = reg
                .inner
                .iter()
                .flat_map(|r| r.vertices.iter())
                .map(|v| reg.outer.iter().map(|o| o.max_violation(v)).fold(f64::INFINITY, f64::min))
                .fold(f64::NEG_INFINITY, f64::max);
            let inner_path = with_suffix(&stem, ".inner.csv");
            let outer_path = with_suffix(&stem, ".outer.csv");
            let json_path = with_suffix(&stem, ".json");
            files.push((inner_path.clone(), polygons_csv(&reg.inner)?));
            files.push((outer_path.clone(), polygons_csv(&reg.outer)?));
            files.push((
                json_path.clone(),
                crate::report::to_string(&json!({
                    "inner": reg.inner.iter().map(region_json).collect::<Vec<_>>(),
                    "outer": reg.outer.iter().map(region_json).collect::<Vec<_>>(),
                })) + "\n",
            ));
            json!({
                "ensembles": family.len(),
                "inner_polygons": reg.inner.len(),
                "outer_polygons": reg.outer.len(),
                "inner_vertices": reg.inner_vertices().iter().map(|v| nums(v)).collect::<Vec<_>>(),
                "skipped_delta_primes": nums(&reg.skipped),
                "inner_outside_outer": opt_num(reg.inner.is_empty().then_some(0.0).or(Some(violation.max(0.0)))),
                "files": [path_str(&inner_path), path_str(&outer_path), path_str(&json_path)],
            })
        }
    };
    Ok(Outcome { report: RunReport { command: "region".into(), config, inputs: vec![loaded.raw], seed: None, results }, files, exit_code: 0 })
}

pub fn decouple(args: &DecoupleArgs) -> Result<Outcome, CliError> {
    if args.samples < 2 {
        return Err(CliError::input("--samples must be at least 2"));
    }
    solver_settings()?;
    let loaded = load(&args.instance)?;
    let inst = parse_instance(&loaded.value).map_err(|e| CliError::input(format!("{}: {e}", args.instance.display())))?;
    let rep = verify_direct_theorem(&inst, args.samples, args.seed)?;
    let passed = rep.passed();
    let results = json!({
        "mean_delta": num(rep.mean_delta),
        "std_error": num(rep.std_error),
        "bound_rhs": num(rep.bound_rhs),
        "exponents": nums(&[rep.exponents.0, rep.exponents.1]),
        "samples": rep.n_samples,
        "verdict": if passed { "PASS" } else { "FAIL" },
    });
    let config = json!({"instance": path_str(&args.instance), "samples": args.samples});
    Ok(Outcome {
        report: RunReport { command: "decouple".into(), config, inputs: vec![loaded.raw], seed: Some(args.seed), results },
        files: Vec::new(),
        exit_code: if passed { 0 } else { 4 },
    })
}

pub fn channel_validate(path: &Path) -> Result<Outcome, CliError> {
    let (ch, loaded) = load_channel(path)?;
    let kraus = ch.kraus();
    let d_in = ch.d_in();
    let sum = kraus.iter().fold(CMat::zeros(d_in, d_in), |acc, k| acc + k.adjoint() * k);
    let tp_residual = max_abs(&(sum - CMat::identity(d_in, d_in)));
    let choi_min = eigh(&ch.choi_matrix()).0[0];
    let kind = match ch.kind() {
        ChannelKind::Kraus(_) => "kraus",
        ChannelKind::Choi(_) => "choi",
        ChannelKind::Stinespring { .. } => "stinespring",
    };
    let flag = match ch.trace_flag() {
        TraceFlag::TracePreserving => "trace-preserving",
        TraceFlag::TraceNonIncreasing => "trace-non-increasing",
        TraceFlag::GeneralCp => "general-cp",
    };
    let valid = ch.trace_flag() == TraceFlag::TracePreserving;
    let results = json!({
        "valid": valid,
        "representation": kind,
        "dims": [d_in, ch.d_out()],
        "input": ch.in_layout().labels(),
        "output": ch.out_layout().labels(),
        "kraus_count": kraus.len(),
        "canonical_kraus_count": ch.canonical_kraus().len(),
        "trace_flag": flag,
        "tp_residual": num(tp_residual),
        "choi_min_eigenvalue": num(choi_min),
    });
    Ok(Outcome {
        report: RunReport {
            command: "channel validate".into(),
            config: json!({"channel": path_str(path)}),
            inputs: vec![loaded.raw],
            seed: None,
            results,
        },
        files: Vec::new(),
        exit_code: if valid { 0 } else { 2 },
    })
}
