use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use stabnull_core::nullity::compute_s_unitary;
use stabnull_core::{build_unitary, Circuit, ExactScalar, NullityReport};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabnull"))
        .args(args)
        .env_remove("STABNULL_BACKEND")
        .env_remove("STABNULL_FORMAT")
        .env_remove("STABNULL_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn gate_reports_t_nullity() {
    let o = run(&["gate", "--file", &fixture("t.qc")]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("Clifford: no"), "{out}");
    assert!(out.contains("= 1"), "{out}");
}

#[test]
fn gate_json_round_trips_and_matches_library() {
    let path = fixture("special3.qc");
    let o = run(&["gate", "--file", &path, "--format", "json", "--no-timing"]);
    assert!(o.status.success());
    let report: NullityReport = serde_json::from_slice(&o.stdout).unwrap();
    let c: Circuit = std::fs::read_to_string(&path).unwrap().parse().unwrap();
    let lib = compute_s_unitary(&build_unitary::<ExactScalar>(&c).unwrap()).unwrap();
    assert_eq!((report.s, report.nullity, report.n), (lib.s, lib.nullity, 3));
    assert_eq!((report.s, report.nullity), (1, 6));
}

#[test]
fn clifford_circuit_has_zero_nullity() {
    let o = run(&["gate", "--file", &fixture("bell_prep.qc"), "--format", "json"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["nullity"], 0);
    assert!(stdout(&run(&["gate", "--file", &fixture("bell_prep.qc")])).contains("Clifford: yes"));
}

#[test]
fn inline_circuit_and_float_backend() {
    let o = run(&["gate", "--circuit", "qubits 3;ccz 0 1 2", "--backend", "float", "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["nullity"], 3);
    assert_eq!(v["backend"], "float");
}

#[test]
fn state_of_ccz_on_plus() {
    let o = run(&["state", "--file", &fixture("ccz.qc"), "--init", "plus", "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["report"]["nullity"], 3);
    assert_eq!(v["stab_group"], serde_json::json!(["III"]));
}

#[test]
fn compare_shows_strict_separation() {
    let o = run(&["compare", "--file", &fixture("special3.qc"), "--format", "json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!((v["nullity"].as_u64(), v["state_max"].as_u64(), v["aux_phi"].as_u64()), (Some(6), Some(3), Some(6)));
    assert_eq!(v["strict_separation"], true);

    let v = json(&run(&["compare", "--file", &fixture("ccz.qc"), "--format", "json"]));
    assert_eq!(v["state_max"], 3);
    assert_eq!(v["plus_attains_max"], true);
    assert_eq!(v["strict_separation"], false);
}

#[test]
fn stabilizer_counts() {
    for (n, count) in [(1, 6), (2, 60), (3, 1080)] {
        let o = run(&["stabilizers", "--qubits", &n.to_string()]);
        assert!(o.status.success());
        let out = stdout(&o);
        assert!(out.lines().any(|l| l.starts_with("states") && l.ends_with(&count.to_string())), "{out}");
    }
}

#[test]
fn parse_errors_exit_with_two() {
    let o = run(&["gate", "--file", &fixture("bad.qc")]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert_eq!(run(&["gate", "--file", "/nonexistent/x.qc"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--check", "no_such_check"]).status.code(), Some(2));
}

#[test]
fn oversized_input_exits_with_three() {
    let o = run(&["gate", "--circuit", "qubits 8;h 0"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["gate", "--circuit", "qubits 3;t 0", "--max-qubits", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_passes_and_detects_injected_fault() {
    let o = run(&["verify", "--check", "t_transfer_matrix", "--format", "json"]);
    assert!(o.status.success());
    assert_eq!(json(&o)[0]["passed"], true);
    let o = run(&["verify", "--check", "t_transfer_matrix", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_lists_every_check() {
    let out = stdout(&run(&["verify", "--list"]));
    let names: Vec<&str> = out.lines().collect();
    assert_eq!(names, stabnull_core::theorems::check_names());
}

#[test]
fn json_is_identical_across_thread_counts() {
    let args = |t: &'static str| ["verify", "--format", "json", "--no-timing", "--seed", "9", "--threads", t];
    let one = run(&args("1"));
    let many = run(&args("8"));
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn environment_sets_defaults() {
    let o = Command::new(env!("CARGO_BIN_EXE_stabnull"))
        .args(["gate", "--file", &fixture("t.qc")])
        .env("STABNULL_FORMAT", "json")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(json(&o)["nullity"], 1);
}
