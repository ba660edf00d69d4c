use std::fs;
use std::io::{BufReader, Write};
use std::process::{Command, Output, Stdio};

use qkneser::kneser::parse_dimacs;
use serde_json::Value;

fn qkneser(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkneser"))
        .args(["--threads", "1"])
        .args(args)
        .output()
        .expect("binary runs")
}

fn qkneser_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qkneser"))
        .args(["--threads", "1"])
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn counts_q3_lists_lines_of_pg3() {
    let out = qkneser(&["counts", "--q", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["gaussian"][4][2], 130);
    assert_eq!(v["flags"]["{2,3}"], 15730);
}

#[test]
fn counts_q2_flags_and_constants() {
    let v = json(&qkneser(&["counts", "--q", "2"]));
    assert_eq!(v["flags"]["{2,3}"], 1085);
    assert_eq!(v["flags"]["{2,4}"], 1085);
    assert_eq!(v["constants"]["e0_23"], 133);
    assert_eq!(v["constants"]["e0_24"], 105);
    assert_eq!(v["theta"], serde_json::json!([1, 3, 7, 15, 31]));
}

#[test]
fn covering24_q3_piped_into_verify() {
    let color = qkneser(&["color", "--q", "3", "--construction", "covering24"]);
    assert!(color.status.success());
    let out = qkneser_stdin(&["verify", "-"], &color.stdout);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["ok"], true);
    assert_eq!(v["report"]["num_classes"], 40);
}

#[test]
fn line23_q2_has_thirteen_classes() {
    let out = qkneser(&[
        "color",
        "--q",
        "2",
        "--construction",
        "line23",
        "--classes-expected",
        "13",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = qkneser(&[
        "color",
        "--q",
        "2",
        "--construction",
        "line23",
        "--classes-expected",
        "12",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tampered_coloring_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let path_str = path.to_str().unwrap();
    let out = qkneser(&["color", "--q", "2", "--construction", "plane23", "--out", path_str]);
    assert!(out.status.success());
    assert_eq!(qkneser(&["verify", path_str]).status.code(), Some(0));

    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let members = doc["classes"][0]["members"].as_array_mut().unwrap();
    members.truncate(members.len() - 1);
    doc.as_object_mut().unwrap().remove("colors");
    fs::write(&path, doc.to_string()).unwrap();
    assert_eq!(qkneser(&["verify", path_str]).status.code(), Some(2));
}

#[test]
fn ekr_family_round_trips_through_verify() {
    let out = qkneser(&["ekr", "--q", "2", "--kind", "point-solid", "--a", "0", "--b", "0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["family"]["members"].as_array().unwrap().len(), 133);
    let v = json(&qkneser_stdin(&["verify"], &out.stdout));
    assert_eq!(v["report"]["maximal"], true);

    let bad = qkneser(&["ekr", "--q", "2", "--kind", "nonsense", "--a", "0", "--b", "0"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(qkneser(&["counts"]).status.code(), Some(1));
    assert_eq!(qkneser(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qkneser(&["counts", "--q", "6"]).status.code(), Some(1));
    assert_eq!(qkneser(&["graph", "--q", "2", "--omega", "2,9"]).status.code(), Some(1));
    assert_eq!(qkneser(&["--help"]).status.code(), Some(0));
}

#[test]
fn enumeration_limit_is_honored() {
    let out = qkneser(&["--limit", "100", "graph", "--q", "2", "--omega", "2,3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_qkneser"))
        .args(["counts", "--q", "2"])
        .env("QKNESER_LIMIT", "100")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_qkneser"))
        .args(["color", "--q", "2", "--construction", "line23"])
        .env("QKNESER_LIMIT", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn require_exact_with_tiny_budget_exits_three() {
    let args = ["alpha", "--q", "2", "--omega", "2,3", "--max-nodes", "5"];
    let out = qkneser(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["lower"].as_u64().unwrap() >= 133);
    let mut exact = args.to_vec();
    exact.push("--require-exact");
    assert_eq!(qkneser(&exact).status.code(), Some(3));
}

#[test]
fn graph_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dimacs");
    let out = qkneser(&["graph", "--q", "2", "--omega", "{2,4}", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let meta = json(&out);
    let (n, edges) = parse_dimacs(BufReader::new(fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(n, 1085);
    assert_eq!(meta["vertices"], 1085);
    assert_eq!(edges.len() as u64, meta["edges"].as_u64().unwrap());

    let g = qkneser::KneserGraph::build(2, 5, &qkneser::FlagType::new(5, &[2, 4]).unwrap(), 1 << 20).unwrap();
    for &(a, b) in edges.iter().step_by(97) {
        assert!(g.adjacent(a, b));
    }
    let stdout = qkneser(&["graph", "--q", "2", "--omega", "2,4"]);
    assert_eq!(stdout.stdout, fs::read(&path).unwrap());
}

#[test]
fn identity_and_falsifier() {
    let out = qkneser(&["identity", "--q-max", "16"]);
    assert!(out.status.success());
    assert_eq!(json(&out).as_array().unwrap().len(), 15);
    let out = qkneser(&[
        "falsify",
        "--q",
        "2",
        "--omega",
        "2,4",
        "--restarts",
        "50",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["exceeded_e1"], false);
    assert!(v["best_size"].as_u64().unwrap() <= 77);
}

#[test]
fn heavy_solid_reports_and_rejects_collinear() {
    let out = qkneser(&[
        "heavy-solid",
        "--q",
        "3",
        "--p",
        "0,1,5",
        "--random",
        "40",
        "--seed",
        "1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["check"]["satisfiable_at_this_q"], false);
    assert_eq!(v["instance"]["points"].as_array().unwrap().len(), 40);
    let out = qkneser(&["heavy-solid", "--q", "3", "--p", "0,1,2", "--points", "40,41"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn subspace_json_parameters() {
    let line = r#"{"n":5,"q":2,"rref":[[0,0,0,1,0],[0,0,0,0,1]]}"#;
    let out = qkneser(&[
        "ekr",
        "--q",
        "2",
        "--kind",
        "point-line",
        "--a",
        r#"{"n":5,"q":2,"rref":[[0,0,0,1,0]]}"#,
        "--b",
        line,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let wrong_dim = qkneser(&["ekr", "--q", "2", "--kind", "point-line", "--a", line, "--b", line]);
    assert_eq!(wrong_dim.status.code(), Some(1));
}
