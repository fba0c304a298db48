//! Input files: channel files, states and decoupling instances. All are
//! UTF-8 JSON with complex entries written as `[re, im]` and matrices as
//! row-major arrays of rows.

use crate::error::CliError;
use qcap_channels::{standard_channel, ChannelRep, StandardChannel};
use qcap_decoupling::{partial_trace_map, random_coherent_state, RPDInstance};
use qcap_linalg::{c64, outer, CMat, CVec, Complex64, DensityOperator, Normalization, SystemLayout};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::path::Path;

pub const SPEC_VERSION: u64 = 1;

/// A parsed file together with its raw bytes, which feed the config hash.
pub struct Loaded {
    pub value: Value,
    pub raw: String,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let value = serde_json::from_str(&raw).map_err(|e| {
        CliError::input(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })?;
    Ok(Loaded { value, raw })
}

fn bad(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::input(format!("field `{path}`: {msg}"))
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value, CliError> {
    v.as_object()
        .ok_or_else(|| bad(path, "expected an object"))?
        .get(key)
        .ok_or_else(|| bad(&join(path, key), "missing"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn as_f64(v: &Value, path: &str) -> Result<f64, CliError> {
    v.as_f64().ok_or_else(|| bad(path, "expected a number"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize, CliError> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(path, "expected a nonnegative integer"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, CliError> {
    v.as_str().ok_or_else(|| bad(path, "expected a string"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn optional<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    v.as_object().and_then(|o| o.get(key))
}

fn check_version(v: &Value) -> Result<(), CliError> {
    let ver = field(v, "version", "")?;
    if ver.as_u64() != Some(SPEC_VERSION) {
        return Err(bad("version", format!("expected {SPEC_VERSION}, found {ver}")));
    }
    Ok(())
}

fn complex(v: &Value, path: &str) -> Result<Complex64, CliError> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(c64(as_f64(re, &format!("{path}[0]"))?, as_f64(im, &format!("{path}[1]"))?)),
        _ => Err(bad(path, "expected a [re, im] pair")),
    }
}

fn vector(v: &Value, path: &str) -> Result<CVec, CliError> {
    let entries = as_array(v, path)?;
    let vals: Vec<Complex64> = entries
        .iter()
        .enumerate()
        .map(|(i, x)| complex(x, &format!("{path}[{i}]")))
        .collect::<Result<_, _>>()?;
    Ok(CVec::from_vec(vals))
}

/// Row-major matrix with the given shape (`None` accepts any).
fn matrix(v: &Value, shape: (Option<usize>, Option<usize>), path: &str) -> Result<CMat, CliError> {
    let rows = as_array(v, path)?;
    if let Some(r) = shape.0 {
        if rows.len() != r {
            return Err(bad(path, format!("expected {r} rows, found {}", rows.len())));
        }
    }
    if rows.is_empty() {
        return Err(bad(path, "empty matrix"));
    }
    let mut data = Vec::new();
    let mut ncols = None;
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let row = vector(row, &rp)?;
        let want = ncols.or(shape.1).unwrap_or(row.len());
        if row.len() != want {
            return Err(bad(&rp, format!("expected {want} columns, found {}", row.len())));
        }
        ncols = Some(want);
        data.extend(row.iter().copied());
    }
    Ok(CMat::from_row_slice(rows.len(), ncols.unwrap_or(0), &data))
}

fn dims(v: &Value) -> Result<(usize, usize), CliError> {
    let d = as_array(field(v, "dims", "")?, "dims")?;
    match d.as_slice() {
        [a, b] => {
            let (a, b) = (as_usize(a, "dims[0]")?, as_usize(b, "dims[1]")?);
            if a == 0 || b == 0 {
                return Err(bad("dims", "dimensions must be positive"));
            }
            Ok((a, b))
        }
        _ => Err(bad("dims", "expected [d_in, d_out]")),
    }
}

/// Parses a channel file:
/// `{"version": 1, "kind": "kraus"|"choi"|"stinespring"|"standard",
///   "dims": [d_in, d_out], "data": ...}` with optional `"input"` and
/// `"output"` labels (default `A` and `B`).
pub fn parse_channel(v: &Value) -> Result<ChannelRep, CliError> {
    check_version(v)?;
    let kind = as_str(field(v, "kind", "")?, "kind")?;
    let (d_in, d_out) = dims(v)?;
    let data = field(v, "data", "")?;
    let label = |key: &str, default: &str| -> Result<String, CliError> {
        optional(v, key).map(|x| as_str(x, key).map(str::to_string)).unwrap_or(Ok(default.to_string()))
    };
    let (li, lo) = (label("input", "A")?, label("output", "B")?);
    let (lin, lout) = (SystemLayout::single(&li, d_in), SystemLayout::single(&lo, d_out));
    let ch = match kind {
        "kraus" => {
            let ops = as_array(data, "data")?;
            if ops.is_empty() {
                return Err(bad("data", "empty Kraus list"));
            }
            let kraus = ops
                .iter()
                .enumerate()
                .map(|(i, k)| matrix(k, (Some(d_out), Some(d_in)), &format!("data[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            ChannelRep::from_kraus(kraus, lin, lout)?
        }
        "choi" => {
            let n = d_in * d_out;
            ChannelRep::from_choi(matrix(data, (Some(n), Some(n)), "data")?, lin, lout)?
        }
        "stinespring" => {
            let iso = matrix(data, (None, Some(d_in)), "data")?;
            if iso.nrows() % d_out != 0 {
                return Err(bad("data", format!("{} rows is not a multiple of d_out = {d_out}", iso.nrows())));
            }
            ChannelRep::from_stinespring(iso.clone(), iso.nrows() / d_out, lin, lout)?
        }
        "standard" => {
            let name = as_str(field(data, "name", "data")?, "data.name")?;
            let param = as_f64(field(data, "param", "data")?, "data.param")?;
            let kind: StandardChannel = name.parse().map_err(|e: qcap_channels::ChannelError| bad("data.name", e))?;
            let ch = standard_channel(kind, param).map_err(|e| bad("data.param", e))?;
            if (ch.d_in(), ch.d_out()) != (d_in, d_out) {
                return Err(bad("dims", format!("{name} maps {} -> {}", ch.d_in(), ch.d_out())));
            }
            ch.relabel(lin, lout)?
        }
        other => return Err(bad("kind", format!("unknown kind `{other}`"))),
    };
    Ok(ch)
}

/// Parses a state file:
/// `{"version": 1, "systems": [["A", 2], ["B", 2]], "matrix": ...}` or with
/// `"vector"` for a pure state.
pub fn parse_state(v: &Value) -> Result<DensityOperator, CliError> {
    check_version(v)?;
    let systems = as_array(field(v, "systems", "")?, "systems")?;
    let mut factors = Vec::new();
    for (i, s) in systems.iter().enumerate() {
        let p = format!("systems[{i}]");
        match s.as_array().map(|a| a.as_slice()) {
            Some([name, d]) => factors.push((as_str(name, &p)?.to_string(), as_usize(d, &p)?)),
            _ => return Err(bad(&p, "expected a [name, dim] pair")),
        }
    }
    let layout = SystemLayout::new(factors)?;
    let n = layout.total_dim();
    let m = match (optional(v, "matrix"), optional(v, "vector")) {
        (Some(m), None) => matrix(m, (Some(n), Some(n)), "matrix")?,
        (None, Some(x)) => {
            let x = vector(x, "vector")?;
            if x.len() != n {
                return Err(bad("vector", format!("expected {n} entries, found {}", x.len())));
            }
            outer(&x)
        }
        _ => return Err(bad("matrix", "give exactly one of `matrix` and `vector`")),
    };
    Ok(DensityOperator::new(m, layout, Normalization::Normalized)?)
}

fn seed_of(v: &Value, path: &str) -> Result<u64, CliError> {
    optional(v, "seed").map(|s| s.as_u64().ok_or_else(|| bad(&join(path, "seed"), "expected an integer"))).unwrap_or(Ok(0))
}

/// Parses a decoupling instance:
/// `{"version": 1, "j": J, "r": r, "epsilon": e, "mu": m, "state": S, "map": T}`
/// where `S` is `{"kind": "random", "r_ref": .., "mixture": .., "seed": ..}`
/// or `{"kind": "matrix", "r_ref": .., "matrix": ..}` on `A x R`, and `T` is
/// `{"kind": "partial_trace", "keep": "classical"|"quantum"}`,
/// `{"kind": "replacement", "d_out": ..}`,
/// `{"kind": "random", "d_out": .., "env": .., "seed": ..}` or
/// `{"kind": "channel", "channel": <channel file>}`.
pub fn parse_instance(v: &Value) -> Result<RPDInstance, CliError> {
    check_version(v)?;
    let j = as_usize(field(v, "j", "")?, "j")?;
    let r = as_usize(field(v, "r", "")?, "r")?;
    if j == 0 || r == 0 {
        return Err(bad("j", "j and r must be positive"));
    }
    let num = |key: &str| optional(v, key).map(|x| as_f64(x, key)).unwrap_or(Ok(0.0));
    let (eps, mu) = (num("epsilon")?, num("mu")?);
    let s = field(v, "state", "")?;
    let r_ref = as_usize(field(s, "r_ref", "state")?, "state.r_ref")?;
    if r_ref == 0 {
        return Err(bad("state.r_ref", "must be positive"));
    }
    let psi = match as_str(field(s, "kind", "state")?, "state.kind")? {
        "random" => {
            let mix = optional(s, "mixture").map(|x| as_usize(x, "state.mixture")).unwrap_or(Ok(1))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed_of(s, "state")?);
            random_coherent_state(j, r, r_ref, mix, &mut rng)
        }
        "matrix" => {
            let n = j * r * j * r_ref;
            let m = matrix(field(s, "matrix", "state")?, (Some(n), Some(n)), "state.matrix")?;
            let layout = SystemLayout::new(vec![("A", j * r), ("R", j * r_ref)])?;
            DensityOperator::new(m, layout, Normalization::Normalized)?
        }
        other => return Err(bad("state.kind", format!("unknown kind `{other}`"))),
    };
    let t = field(v, "map", "")?;
    let map = match as_str(field(t, "kind", "map")?, "map.kind")? {
        "partial_trace" => {
            let keep = optional(t, "keep").map(|x| as_str(x, "map.keep")).unwrap_or(Ok("classical"))?;
            match keep {
                "classical" => partial_trace_map(j, r, true),
                "quantum" => partial_trace_map(j, r, false),
                other => return Err(bad("map.keep", format!("expected classical or quantum, found `{other}`"))),
            }
        }
        "replacement" => {
            let d_out = as_usize(field(t, "d_out", "map")?, "map.d_out")?;
            replacement(j * r, d_out)?
        }
        "random" => {
            let d_out = as_usize(field(t, "d_out", "map")?, "map.d_out")?;
            let env = as_usize(field(t, "env", "map")?, "map.env")?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed_of(t, "map")?);
            qcap_channels::random_channel(j * r, d_out, env, &mut rng)?
        }
        "channel" => parse_channel(field(t, "channel", "map")?)?,
        other => return Err(bad("map.kind", format!("unknown kind `{other}`"))),
    };
    if map.d_in() != j * r {
        return Err(bad("map", format!("map acts on dimension {}, expected {}", map.d_in(), j * r)));
    }
    Ok(RPDInstance::new(&psi, j, r, &map, eps, mu)?)
}

/// `X -> Tr(X) I/d_out`.
fn replacement(d_in: usize, d_out: usize) -> Result<ChannelRep, CliError> {
    if d_out == 0 {
        return Err(bad("map.d_out", "must be positive"));
    }
    let s = c64(1.0 / (d_out as f64).sqrt(), 0.0);
    let mut kraus = Vec::with_capacity(d_in * d_out);
    for m in 0..d_out {
        for i in 0..d_in {
            let mut k = CMat::zeros(d_out, d_in);
            k[(m, i)] = s;
            kraus.push(k);
        }
    }
    Ok(ChannelRep::kraus_ab(kraus)?)
}
