use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn qcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcap")).args(args).output().expect("qcap runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn bell_state_min_entropy_is_minus_one() {
    let out = qcap(&["entropy", "--state", &fixture("bell.json"), "--which", "hmin"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "entropy");
    assert!((v["results"]["value"].as_f64().unwrap() + 1.0).abs() < 1e-6);
    assert!(v["config_hash"].as_str().unwrap().len() == 64);
}

#[test]
fn input_errors_exit_two() {
    let bad_eps = qcap(&["entropy", "--state", &fixture("bell.json"), "--which", "hmin_smooth", "--eps", "1.2"]);
    assert_eq!(bad_eps.status.code(), Some(2));
    let missing = qcap(&["entropy", "--state", "/nonexistent/state.json", "--which", "hmin"]);
    assert_eq!(missing.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("half.json");
    std::fs::write(&path, r#"{"version": 1, "kind": "kraus", "dims": [2, 2], "data": [[[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]]}"#)
        .unwrap();
    let out = qcap(&["channel", "validate", "--channel", &path.display().to_string()]);
    assert_eq!(out.status.code(), Some(2));

    let malformed = dir.path().join("bad.json");
    std::fs::write(&malformed, "{\"version\": 1,\n \"kind\": }").unwrap();
    let out = qcap(&["channel", "validate", "--channel", &malformed.display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn channel_validate_reports_trace_preservation() {
    let out = qcap(&["channel", "validate", "--channel", &fixture("amplitude_damping_choi.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["results"]["tp_residual"].as_f64().unwrap() < 1e-9);
    assert!(v["results"]["choi_min_eigenvalue"].as_f64().unwrap() > -1e-9);
}

#[test]
fn identity_asymptotic_region_reaches_the_axes() {
    let dir = tempfile::tempdir().unwrap();
    let stem: PathBuf = dir.path().join("id");
    let out = qcap(&["region", "--mode", "asymptotic", "--channel", &fixture("identity.json"), "--out", &stem.display().to_string()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("C,Q,E"));
    let points: Vec<Vec<f64>> = rows.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    for target in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]] {
        assert!(points.iter().any(|p| p.iter().zip(&target).all(|(a, b)| (a - b).abs() < 1e-9)));
    }
    assert!(stem.with_extension("json").exists());
}

#[test]
fn useless_channel_cannot_send_a_classical_bit() {
    let out = qcap(&[
        "bound", "--mode", "direct", "--code", "1,0,0", "--delta", "0.5", "--source", "classical", "--channel",
        &fixture("depolarizing.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["feasible"], false);
}

#[test]
fn decoupling_check_passes_on_the_fixtures() {
    for f in ["decouple_depolarizing.json", "decouple_random.json"] {
        let out = qcap(&["decouple", "--instance", &fixture(f), "--samples", "200", "--seed", "3"]);
        assert_eq!(out.status.code(), Some(0), "{f}");
        assert_eq!(json(&out)["results"]["verdict"], "PASS");
    }
}
