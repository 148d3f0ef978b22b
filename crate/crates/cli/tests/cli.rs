use std::path::PathBuf;
use std::process::{Command, Output};

use rvt_core::{CheckResult, Verdict};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(rel: &str) -> String {
    root().join("fixtures").join(rel).to_string_lossy().into_owned()
}

fn rvt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rvt")).args(args).env_remove("RVT_SMT_SOLVER").env_remove("RVT_SMT_TIMEOUT_MS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn parse_valid_project() {
    let o = rvt(&["parse", &fixture("train.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "7 constraints OK");
}

#[test]
fn parse_reports_bad_constraint_with_id_and_span() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("contradictory.json")).unwrap().replace("t.speed < 0", "t.sped < 0");
    let path = dir.path().join("bad.json");
    std::fs::write(&path, text).unwrap();
    let o = rvt(&["parse", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let first = out.lines().next().unwrap();
    assert!(first.starts_with("R2[0] at "), "{out}");
    assert!(first.ends_with("unknown attribute sped"), "{out}");
    assert!(out.contains("1 error(s)"));
}

#[test]
fn parse_missing_file() {
    let o = rvt(&["parse", "/nonexistent/project.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: "));
}

#[test]
fn contradictory_consistency_lists_prose() {
    let o = rvt(&["check", "consistency", &fixture("contradictory.json")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("consistency: INCONSISTENT"), "{out}");
    assert!(out.contains("  R1: The speed of the train is never negative.\n"));
    assert!(out.contains("  R2: At some point the train moves backwards.\n"));
    assert!(!out.contains("R3:"));
}

#[test]
fn possible_scenario_renders_trace() {
    let o = rvt(&["check", "scenario", &fixture("ramp.json"), "--id", "S1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("scenario S1: POSSIBLE"));
    assert!(out.contains("witness:"));
    assert!(out.contains("↺ to step"));
}

#[test]
fn unknown_property_exits_three() {
    let o = rvt(&["check", "property", &fixture("ramp_progress.json"), "--id", "P1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("UNKNOWN (bound-exhausted; refinement-stuck)"));
}

#[test]
fn json_output_parses_back() {
    let o = rvt(&["check", "property", &fixture("train.json"), "--id", "P2", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let r: CheckResult = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.verdict, Verdict::Violated);
    assert!(r.witness.is_some());

    let o = rvt(&["check", "all", &fixture("train.json"), "--json", "--jobs", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let rs: Vec<CheckResult> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rs.len(), 5);
    assert_eq!(rs[0].verdict, Verdict::Consistent);
}

#[test]
fn check_all_exit_codes() {
    assert_eq!(rvt(&["check", "all", &fixture("ramp.json")]).status.code(), Some(0));
    assert_eq!(rvt(&["check", "all", &fixture("ramp_progress.json")]).status.code(), Some(3));
    assert_eq!(rvt(&["check", "all", &fixture("contradictory.json")]).status.code(), Some(1));
}

#[test]
fn usage_errors() {
    let p = fixture("train.json");
    assert_eq!(rvt(&["check", "scenario", &p]).status.code(), Some(2));
    assert_eq!(rvt(&["check", "consistency", &p, "--bound-schedule", "4,2"]).status.code(), Some(2));
    assert_eq!(rvt(&["check", "consistency", &p, "--timeout-ms", "0"]).status.code(), Some(2));
    let o = rvt(&["check", "scenario", &p, "--id", "P1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("category mismatch"));
    assert_eq!(rvt(&["check", "consistency", &p, "--solver", "/nonexistent/z3"]).status.code(), Some(2));
}

#[test]
fn custom_schedule_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let o = rvt(&[
        "check",
        "consistency",
        &fixture("ramp.json"),
        "--bound-schedule",
        "1,2",
        "--dump-smt",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bounds 1,2"));
    let n = std::fs::read_dir(dir.path()).unwrap().count();
    assert!(n >= 1);
}

#[test]
fn trace_rendering() {
    let o = rvt(&["trace", &fixture("traces/two_flows.json")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().filter(|l| l.starts_with(char::is_numeric)).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains("flow") && rows[0].contains("Ramp#1.x: 0 -> 1"));
    assert!(rows[1].contains("Ramp#1.x: 1 -> 2"));
    assert!(rows.iter().all(|r| r.split_whitespace().nth(2) == Some("1")));

    let o = rvt(&["trace", &fixture("traces/jump_loop.json")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with(char::is_numeric)).count(), 1);
    assert!(out.contains("↺ to step 0"));

    let o = rvt(&["trace", &fixture("traces/zero_flow.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invariant violation: flow with zero duration"));
}

#[test]
fn malformed_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(&path, "{\"states\": 3}").unwrap();
    let o = rvt(&["trace", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("malformed trace file"));
}
