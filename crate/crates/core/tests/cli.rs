//! End-to-end tests of the `fqs` binary: exit codes, artifacts, determinism.

use std::fs;
use std::path::Path;
use std::process::Command;

fn fqs() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fqs"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn simulate_driven_qubit_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.json",
        r#"{
            "preset": "driven_qubit",
            "params": {"delta": 1.0, "v": 1.0, "omega": 1.0},
            "t": 6.283185307179586,
            "epsilon": 1e-4,
            "regime": "adiabatic",
            "seed": 3,
            "outputs": ["state", "summary"]
        }"#,
    );
    let out = dir.path().join("artifacts");
    let status = fqs()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let fidelity = summary["diagnostics"]["fidelity"].as_f64().unwrap();
    assert!(fidelity >= 0.9999, "fidelity column {fidelity}");
    assert!(out.join("state.csv").exists());
    assert!(out.join("summary.csv").exists());
}

#[test]
fn invalid_epsilon_exits_2_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"preset": "driven_qubit", "t": 1.0, "epsilon": 2.0}"#,
    );
    let out = dir.path().join("artifacts");
    let output = fqs()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(
        err.contains("InvalidEpsilon"),
        "machine-readable record: {err}"
    );
    assert!(!out.exists(), "no artifacts on validation failure");
}

#[test]
fn verify_with_corrupted_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let ix = "[0.0,0.0, 0.0,1.0, 0.0,1.0, 0.0,0.0]";
    let cfg = write_config(
        dir.path(),
        "bad.json",
        &format!(
            r#"{{
                "preset": "custom",
                "params": {{"dim": 2, "omega": 1.0,
                            "components": {{"1": {ix}, "-1": {ix}}}}},
                "t": 1.0,
                "epsilon": 1e-3
            }}"#
        ),
    );
    let output = fqs()
        .args(["verify", "--suite", "bounds", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("v"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("NonHermitianPair"));
}

#[test]
fn corrupted_custom_hamiltonian_exits_2() {
    // H_1 = H_{-1} = i X breaks the Hermitian pairing
    let dir = tempfile::tempdir().unwrap();
    let ix = "[0.0,0.0, 0.0,1.0, 0.0,1.0, 0.0,0.0]";
    let cfg = write_config(
        dir.path(),
        "bad.json",
        &format!(
            r#"{{
                "preset": "custom",
                "params": {{"dim": 2, "omega": 1.0,
                            "components": {{"1": {ix}, "-1": {ix}}}}},
                "t": 1.0,
                "epsilon": 1e-3
            }}"#
        ),
    );
    let output = fqs()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("artifacts"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("non-Hermitian"));
}

#[test]
fn verify_amplification_suite_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let output = fqs()
        .args(["verify", "--suite", "amplification", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{:?}", output);
    let csv = fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    assert!(csv.starts_with("suite,quantity,context,bound,measured,slack,premise_ok"));
    assert!(csv.lines().count() > 10);
}

#[test]
fn resources_table_and_eps_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let status = fqs()
        .args([
            "resources",
            "--alpha",
            "100",
            "--omega",
            "1",
            "--t",
            "100",
            "--epsilon",
            "1e-3,1e-6",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("resources.csv")).unwrap();
    // 5 regimes x 2 epsilons + header
    assert_eq!(csv.lines().count(), 11);
    // additive vs multiplicative eps dependence between longtime and Dyson;
    // rows come in regime order within each epsilon block (1e-3 then 1e-6)
    let query = |regime: &str, block: usize| -> f64 {
        csv.lines()
            .skip(1 + 5 * block)
            .take(5)
            .find(|l| l.starts_with(regime))
            .and_then(|l| l.split(',').nth(7))
            .and_then(|v| v.parse().ok())
            .unwrap()
    };
    let lt_ratio = query("longtime", 1) / query("longtime", 0);
    let dyson_ratio = query("truncated_dyson", 1) / query("truncated_dyson", 0);
    assert!(
        lt_ratio < dyson_ratio,
        "additive ({lt_ratio}) vs multiplicative ({dyson_ratio})"
    );
}

#[test]
fn simulate_hubbard_half_period() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "hub.json",
        r#"{
            "preset": "hubbard2",
            "t": 0.25,
            "epsilon": 1e-2,
            "regime": "adiabatic",
            "outputs": ["summary"]
        }"#,
    );
    let out = dir.path().join("artifacts");
    let status = fqs()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let fidelity = summary["diagnostics"]["fidelity"].as_f64().unwrap();
    assert!(fidelity >= 1.0 - 1e-2, "fidelity {fidelity}");
    assert!(
        !out.join("state.csv").exists(),
        "outputs selector respected"
    );
}

#[test]
fn simulate_is_deterministic_for_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "exp.json",
        r#"{"preset": "driven_qubit", "t": 1.0, "epsilon": 1e-3, "seed": 11}"#,
    );
    let run = |out: &Path| {
        let status = fqs()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        let mut v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        v["generated_at"] = serde_json::Value::Null;
        v["diagnostics"]["wall_time_s"] = serde_json::Value::Null;
        (v, fs::read_to_string(out.join("state.csv")).unwrap())
    };
    let (ja, sa) = run(&dir.path().join("a"));
    let (jb, sb) = run(&dir.path().join("b"));
    assert_eq!(ja, jb);
    assert_eq!(sa, sb, "state.csv must be bit-identical");
}
