//! End-to-end runs of the installed binary: artifact round trips, error
//! objects, seeding, and report determinism.

use std::path::Path;
use std::process::{Command, Output};

use qjunta::instance::Instance;
use qjunta_cli::ExperimentReport;

fn qjunta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qjunta"))
        .args(args)
        .env_remove("QJUNTA_SEED")
        .output()
        .expect("binary runs")
}

fn report_of(out: &Output) -> ExperimentReport {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    ExperimentReport::from_json(&String::from_utf8_lossy(&out.stdout)).unwrap()
}

fn error_of(out: &Output) -> serde_json::Value {
    assert!(!out.status.success());
    serde_json::from_str(&String::from_utf8_lossy(&out.stderr)).unwrap()
}

#[test]
fn gen_parity_writes_expected_truth_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p3.json");
    let out = qjunta(&[
        "gen",
        "--kind",
        "boolean",
        "--family",
        "parity-3",
        "--n",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    let report = report_of(&out);
    assert_eq!(report.results["instance"]["truth_table"], "01101001");
    let on_disk = Instance::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(on_disk.kind(), "boolean");
    assert_eq!(on_disk.n(), 3);
}

#[test]
fn gen_dense_over_cap_fails_with_error_object() {
    let out = qjunta(&["gen", "--kind", "dense", "--n", "9"]);
    let err = error_of(&out);
    assert_eq!(err["error"]["kind"], "dense-cap-exceeded");
    assert!(err["error"]["message"].as_str().unwrap().contains('9'));
}

#[test]
fn malformed_instance_file_reports_invalid_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"kind\": \"junta\"").unwrap();
    let out = qjunta(&[
        "test",
        "--instance",
        path.to_str().unwrap(),
        "--k",
        "1",
        "--eps",
        "0.5",
        "--trials",
        "1",
    ]);
    assert_eq!(error_of(&out)["error"]["kind"], "invalid-instance");
}

fn gen_junta(dir: &Path, n: &str, k: &str, seed: &str) -> String {
    let path = dir.join(format!("junta-{n}-{k}-{seed}.json"));
    let out = qjunta(&[
        "gen", "--kind", "junta", "--n", n, "--k", k, "--seed", seed, "--out",
        path.to_str().unwrap(),
    ]);
    report_of(&out);
    path.to_str().unwrap().to_string()
}

#[test]
fn tester_accepts_generated_junta() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen_junta(dir.path(), "5", "2", "7");
    let out = qjunta(&[
        "test",
        "--instance",
        &path,
        "--k",
        "2",
        "--eps",
        "0.5",
        "--trials",
        "5",
        "--seed",
        "3",
    ]);
    let report = report_of(&out);
    assert!(report.results["accept_fraction"].as_f64().unwrap() >= 0.6);
    assert_eq!(report.results["trials"].as_array().unwrap().len(), 5);
    assert!(report.ledger.simulated_u > 0);
    assert!(report.ledger.modeled_quantum > 0);
}

#[test]
fn learner_round_trips_through_learned_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen_junta(dir.path(), "5", "2", "7");
    let learned_path = dir.path().join("learned.json");
    let out = qjunta(&[
        "learn",
        "--instance",
        &path,
        "--k",
        "2",
        "--eps",
        "0.25",
        "--trials",
        "2",
        "--seed",
        "5",
        "--learned-out",
        learned_path.to_str().unwrap(),
    ]);
    let report = report_of(&out);
    assert_eq!(report.results["success_fraction"].as_f64().unwrap(), 1.0);
    let learned =
        Instance::from_json(&std::fs::read_to_string(&learned_path).unwrap()).unwrap();
    assert_eq!(learned.kind(), "junta");
    let hidden = Instance::from_json(&std::fs::read_to_string(&path).unwrap())
        .unwrap()
        .to_unitary()
        .unwrap();
    let d = hidden.dist_to(&learned.to_unitary().unwrap()).unwrap();
    assert!(d <= 0.25, "learned instance too far: {d}");
}

#[test]
fn reports_are_deterministic_and_env_seed_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen_junta(dir.path(), "4", "1", "2");
    let run = |env_seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qjunta"));
        cmd.args([
            "test",
            "--instance",
            &path,
            "--k",
            "1",
            "--eps",
            "0.5",
            "--trials",
            "4",
            "--seed",
            "11",
        ]);
        match env_seed {
            Some(s) => cmd.env("QJUNTA_SEED", s),
            None => cmd.env_remove("QJUNTA_SEED"),
        };
        let out = cmd.output().expect("binary runs");
        report_of(&out)
    };
    let a = run(None);
    let b = run(None);
    assert_eq!(a.canonical_json(), b.canonical_json());
    let c = run(Some("12"));
    assert_eq!(c.parameters["seed"], 12);
    assert_ne!(a.canonical_json(), c.canonical_json());
}

#[test]
fn bench_emits_csv_and_empty_table_exits_zero() {
    let out = qjunta(&[
        "bench", "--k", "1", "--trials", "2", "--algo", "learner", "--format", "csv",
    ]);
    assert!(out.status.success());
    let csv = String::from_utf8_lossy(&out.stdout);
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("algo,k,n,eps,trials"));
    assert!(lines.next().unwrap().starts_with("learner,1,3,0.5,2,"));

    let out = qjunta(&["bench", "--algo", "tester", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1);
}

#[test]
fn verify_core_suite_passes() {
    let out = qjunta(&["verify", "--suite", "core", "--seed", "1"]);
    let report = report_of(&out);
    assert_eq!(report.results["failed"], 0);
    assert!(report.results["checks"].as_array().unwrap().len() >= 5);
}

#[test]
fn unknown_suite_is_rejected() {
    let out = qjunta(&["verify", "--suite", "quantum"]);
    assert_eq!(error_of(&out)["error"]["kind"], "invalid-argument");
}
