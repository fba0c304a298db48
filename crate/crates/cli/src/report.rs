//! Canonical JSON: keys sorted, floats rounded to nine significant digits,
//! non-finite values written as strings.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SIG_DIGITS: usize = 9;

pub fn round_sig(x: f64) -> f64 {
    let r: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("formatted float parses");
    // Collapse -0 so the sign never depends on rounding noise.
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// A float as a JSON value.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        json!(round_sig(x))
    }
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Rounds every float in `v`; object keys are already sorted since
/// `serde_json::Map` is ordered by key.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().expect("f64 number")),
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

pub fn to_string(v: &Value) -> String {
    serde_json::to_string_pretty(&canonical(v.clone())).expect("JSON values serialize")
}

/// Result of one command. Wall time is reported on stderr only, so the
/// report is a function of the inputs.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub config: Value,
    /// Raw contents of every input file, in argument order.
    pub inputs: Vec<String>,
    pub seed: Option<u64>,
    pub results: Value,
}

impl RunReport {
    pub fn config_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.command.as_bytes());
        h.update([0]);
        h.update(to_string(&self.config).as_bytes());
        for input in &self.inputs {
            h.update([0]);
            h.update(input.as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "config_hash": self.config_hash(),
            "seed": self.seed,
            "results": self.results,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_nine_digits() {
        assert_eq!(round_sig(0.123456789123), 0.123456789);
        assert_eq!(round_sig(-1.0000000004), -1.0);
        assert_eq!(round_sig(-1e-30 * 0.0), 0.0);
        assert_eq!(round_sig(123456789987.0), 123456790000.0);
    }

    #[test]
    fn output_is_sorted_and_rounded() {
        let v = json!({"b": 1.23456789012, "a": [f64::MAX, 2], "c": {"z": 0.1, "y": null}});
        let s = to_string(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.contains("1.23456789") && !s.contains("1.234567890"));
        assert!(s.find("\"y\"").unwrap() < s.find("\"z\"").unwrap());
        assert_eq!(num(f64::NEG_INFINITY), json!("-inf"));
    }
}
