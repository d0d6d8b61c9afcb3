use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn robofoil(data: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_robofoil")).args(args).env("ROBOFOIL_DATA", data).output().unwrap()
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> String {
    let p = dir.join(name);
    fs::write(&p, bytes).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn solve_foil_and_explain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let domain = robofoil(d, &["fixture", "--model-error", "speed-error"]);
    assert!(domain.status.success());
    let domain = write(d, "domain.json", &domain.stdout);
    let solved = robofoil(d, &["solve", &domain]);
    assert_eq!(solved.status.code(), Some(0));
    let solution = write(d, "solution.json", &solved.stdout);

    let swap = write(d, "swap.json", br#"[{"robot":"ambulance","task":"D1","op":"unassign"},{"robot":"dumptruck","task":"D1","op":"assign"}]"#);
    let text = robofoil(d, &["explain", &domain, &solution, &swap]);
    assert_eq!(text.status.code(), Some(0));
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("ambulance([2500, 1, 0]) and dumptruck([5000, 0, 1]) can work D1([600, 0, 0])"), "{text}");
    assert!(text.contains("User's solution takes 32% more time"), "{text}");

    let json = robofoil(d, &["explain", "--json", &domain, &solution, &swap]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["outcome"]["feasible"], true);

    // The stretcher cannot ride on the dumptruck.
    let bad = write(d, "bad.json", br#"[{"robot":"ambulance","task":"H1","op":"unassign"},{"robot":"dumptruck","task":"H1","op":"assign"}]"#);
    let out = robofoil(d, &["foil", &domain, &solution, &bad]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["feasible"], false);
    assert_eq!(v["cause"]["type"], "trait_violation");
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let junk = write(d, "junk.json", b"{\"traits\": 3}");
    let out = robofoil(d, &["solve", &junk]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("robofoil: "));

    let out = robofoil(d, &["session", "show", "../etc"]);
    assert_eq!(out.status.code(), Some(2));
    let out = robofoil(d, &["session", "show", "0042"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn metrics_csv_has_one_row_per_session() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for name in ["s1", "s3"] {
        assert!(robofoil(d, &["session", "create", "--scenario", name]).status.success());
    }
    for id in ["0001", "0002"] {
        assert!(robofoil(d, &["session", "finalize", id, "--verdict", "declared-correct"]).status.success());
    }
    let files: Vec<String> =
        ["0001", "0002"].iter().map(|id| d.join("sessions").join(format!("{id}.json")).to_str().unwrap().to_owned()).collect();
    let out = robofoil(d, &["metrics", "--format", "csv", &files[0], &files[1]]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3, "{csv}");
}
