use std::io::Write;
use std::process::{Command, Output, Stdio};

use finalize::instance::parse_instance;

const BIN: &str = env!("CARGO_BIN_EXE_ftm");
const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

fn ftm(args: &[&str]) -> Output {
    Command::new(BIN).args(args).current_dir(DATA).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = ftm(&all);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn da_on_tiny_instance() {
    let o = ftm(&["da", "tiny.inst"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("tent {(r1,h1), (r2,h2)}"));
}

#[test]
fn decisions_are_printed_and_in_json() {
    let o = ftm(&["ftm", "tiny.inst", "--limit", "100000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("(r1,h1) finalizable: true"));
    let v = json(&["ftm", "nine.inst"]);
    assert_eq!(v["finalizable"], false);
    let j = parse_instance(v["counterexample"].as_str().unwrap()).unwrap();
    assert!(j.instance.is_complete());
}

#[test]
fn query_flag_overrides_file() {
    let v = json(&["ftm", "nine.inst", "--query", "a", "X"]);
    assert_eq!(v["finalizable"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(ftm(&["ftm", "nine.inst", "--budget", "1"]).status.code(), Some(3));
    assert_eq!(ftm(&["da", "missing.inst"]).status.code(), Some(1));
    assert_eq!(ftm(&["da", "sat.cnf"]).status.code(), Some(2));
    assert_eq!(ftm(&["ftm-rm", "nine.inst"]).status.code(), Some(1));
    assert_eq!(ftm(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(ftm(&["--help"]).status.code(), Some(0));
}

#[test]
fn reads_stdin() {
    let mut child = Command::new(BIN)
        .args(["safe", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let text = std::fs::read_to_string(format!("{DATA}/nine.inst")).unwrap();
    child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("maximal safe set {(a,X), (b,Y), (c,X), (g,Y), (i,Z)}"));
}

#[test]
fn generated_gadget_round_trips_through_ftm() {
    let o = ftm(&["gen-sat-ftm", "unsat.cnf"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let parsed = parse_instance(&text).unwrap();
    assert!(parsed.query.is_some());
    let path = std::env::temp_dir().join(format!("ftm-cli-{}.inst", std::process::id()));
    std::fs::write(&path, &text).unwrap();
    let v = json(&["ftm", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(v["finalizable"], true);
}
