//! End-to-end CLI tests: exit codes (0 pass / 1 statistical failure /
//! 2 usage or config error) and byte-identical manifest replay.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_lppkit")
}

fn run(args: &[&str], out_dir: &Path) -> Output {
    Command::new(bin())
        .arg("--out")
        .arg(out_dir)
        .args(args)
        .env_remove("LPPKIT_SEED")
        .env_remove("LPPKIT_OUT")
        .output()
        .expect("spawn lppkit")
}

#[test]
fn params_exponential_matches_closed_form_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["params", "--model", "exponential", "--rho", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let payload: serde_json::Value =
        serde_json::from_slice(&stdout_json(&out.stdout)).unwrap();
    assert_eq!(payload["chi3"], 16.0);
    assert_eq!(payload["alpha"], 4.0);
    assert_eq!(payload["beta"], 2.0);
    assert!(dir.path().join("manifest.json").exists());
    assert!(dir.path().join("report.json").exists());
}

/// stdout mixes the JSON payload with pass/fail lines; extract the leading
/// JSON object.
fn stdout_json(stdout: &[u8]) -> Vec<u8> {
    let text = String::from_utf8_lossy(stdout);
    let end = text.rfind('}').unwrap();
    text[..=end].as_bytes().to_vec()
}

#[test]
fn unknown_flag_is_a_usage_error_with_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["params", "--model", "exponential", "--rho", "1", "--bogus"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inadmissible_parameters_are_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    // SJ at rho = p/(1-p): the stationary direction degenerates
    let out = run(&["params", "--model", "sj", "--rho", "1", "--p", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("rho > p/(1-p)"), "{err}");
}

#[test]
fn invalid_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"streams": [{"name": "a", "domain": 1}, {"name": "b", "domain": 1}]}"#,
    )
    .unwrap();
    let out = Command::new(bin())
        .args(["--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.path())
        .args(["params", "--model", "exponential", "--rho", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate stream ids"));
}

#[test]
fn config_file_supplies_seed_default() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 99}"#).unwrap();
    let sub = dir.path().join("out");
    let out = Command::new(bin())
        .args(["--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&sub)
        .args(["sample", "--intensity", "1", "--replicas", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sub.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 99);
}

#[test]
fn env_seed_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(bin())
        .arg("--out")
        .arg(dir.path())
        .args(["--seed", "1", "sample", "--replicas", "1"])
        .env("LPPKIT_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["seed"], 42);
}

#[test]
fn sample_csv_has_x_header_and_replays_byte_identically() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let args =
        ["--seed", "7", "sample", "--intensity", "1.5", "--lo", "-5", "--hi", "5", "--replicas", "3"];
    assert_eq!(run(&args, d1.path()).status.code(), Some(0));
    assert_eq!(run(&args, d2.path()).status.code(), Some(0));
    for r in 0..3 {
        let a = std::fs::read(d1.path().join(format!("points_{r}.csv"))).unwrap();
        let b = std::fs::read(d2.path().join(format!("points_{r}.csv"))).unwrap();
        assert_eq!(a, b, "replay must be byte-identical");
        assert!(a.starts_with(b"x\n") || a.starts_with(b"x\r\n"));
    }
    // manifests agree on every output digest even though timestamps differ
    let m1: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d1.path().join("manifest.json")).unwrap())
            .unwrap();
    let m2: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d2.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m1["output_digests"], m2["output_digests"]);
    assert_eq!(m1["streams"], m2["streams"]);
}

#[test]
fn verify_burke_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["--seed", "7", "verify-burke", "--lambda", "1", "--mu", "2", "--replicas", "2000"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["test"], "burke_poisson");
    assert!(report["sub_tests"].as_array().unwrap().iter().all(|s| s["pass"] == true));
    assert_eq!(report["seeds"][0], 7);
}

#[test]
fn verify_burke_rejects_unstable_queue_as_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify-burke", "--lambda", "2", "--mu", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn verify_pitman_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["--seed", "3", "verify-pitman", "--samples", "200", "--horizon", "20"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}

#[test]
fn verify_fluid_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "--seed", "5", "verify-fluid", "--samples", "100", "--lo", "-15", "--hi", "5",
            "--y", "3", "--t", "2",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}

#[test]
fn exit_tails_writes_tail_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "--seed", "11", "exit-tails", "--model", "hammersley", "--rho", "1", "--n", "300",
            "--m", "0.5", "--m", "1", "--m", "2", "--replicas", "60",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = std::fs::read_to_string(dir.path().join("tails.csv")).unwrap();
    assert!(csv.lines().next().unwrap().starts_with("model,N,M,p_hat,ci_lo,ci_hi"), "{csv}");
    assert!(csv.lines().count() > 3);
}

#[test]
fn sh_marginal_at_desk_scale_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["--seed", "13", "sh-marginal", "--mu", "0.5", "--n", "2000", "--replicas", "800"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = std::fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    assert!(csv.starts_with("replica,x,value"));
}

#[test]
fn oracle_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--seed", "17", "oracle-suite", "--cases", "30"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}

#[test]
fn sh_invariance_small_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "--seed", "19", "sh-invariance", "--model", "exponential", "--rho", "1", "--n", "80",
            "--x", "-1", "--x", "1", "--replicas", "80", "--level", "0.001",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}

#[test]
fn verify_mgf_statistical_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // deliberately tiny replica budget but valid (>= 1000) with a point far
    // from the minimizer: heavy-tailed weights make the check fail reliably
    let out = run(
        &[
            "--seed", "23", "verify-mgf", "--model", "sj", "--n", "2", "--m", "6", "--p", "0.4",
            "--a", "0.2", "--b", "-0.2", "--replicas", "2000",
        ],
        dir.path(),
    );
    // exit 1 = ran to completion, at least one sub-test failed (report written)
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(dir.path().join("report.json").exists());
}
