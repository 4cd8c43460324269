use std::path::Path;
use std::process::{Command, Output};

const INSTANCE: &str = r#"{
  "items": ["a", "b", "c", "d", "e"],
  "constraints": [{"weights": [3, 4, 2, 5, 1], "bins": [6, 5, 4]}],
  "objective": {"kind": "coverage", "universe": [1, 2, 3, 4, 5, 6], "covers": [[0, 1], [1, 2], [3], [4, 5], [0, 5]]},
  "additional": {"kind": "uniform", "rank": 4}
}"#;

fn run(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mkcp-kit"));
    cmd.args(args);
    if let Some(w) = workers {
        cmd.env("MKCP_WORKERS", w);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_accepts_feasible_pair() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", INSTANCE);
    let sol = write(dir.path(), "sol.json", r#"{"selected": ["a", "c"], "assignments": [[["a"], ["c"], []]]}"#);
    let out = run(&["validate", &inst, &sol], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "OK");
}

#[test]
fn validate_rejects_overfull_bin() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", INSTANCE);
    let sol = write(dir.path(), "sol.json", r#"{"selected": ["a", "b"], "assignments": [[["a", "b"], [], []]]}"#);
    let out = run(&["validate", &inst, &sol], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_instance_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", "{\"items\": [");
    let out = run(&["solve", &inst], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn solve_output_validates_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", INSTANCE);
    let one = dir.path().join("one.json").to_string_lossy().into_owned();
    let many = dir.path().join("many.json").to_string_lossy().into_owned();
    for (path, workers) in [(&one, "1"), (&many, "4")] {
        let out = run(&["solve", &inst, "--seed", "3", "--xi", "1", "--out", path], Some(workers));
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&many).unwrap());
    let out = run(&["validate", &inst, &one], None);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn brute_and_uniform_produce_valid_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let uniform = INSTANCE.replace("[6, 5, 4]", "[5, 5, 5]").replace("\"uniform\", \"rank\": 4", "\"free\"");
    let inst = write(dir.path(), "inst.json", &uniform);
    for cmd in ["brute", "solve-uniform"] {
        let path = dir.path().join(format!("{cmd}.json")).to_string_lossy().into_owned();
        let out = run(&[cmd, &inst, "--out", &path], None);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(run(&["validate", &inst, &path], None).status.code(), Some(0));
    }
    let ragged = write(dir.path(), "ragged.json", &INSTANCE.replace("\"uniform\", \"rank\": 4", "\"free\""));
    assert_eq!(run(&["solve-uniform", &ragged], None).status.code(), Some(1));
}

#[test]
fn lp_and_grouping_dump_json() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "inst.json", INSTANCE);
    let out = run(&["lp", &inst], None);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["value"].as_f64().unwrap() > 0.0);
    assert!(v["upper_bound"].as_f64().unwrap() >= v["value"].as_f64().unwrap() - 1e-9);
    let out = run(&["grouping", &inst, "--constraint", "0", "--block", "1", "--mu", "0.5"], None);
    assert_eq!(out.status.code(), Some(0));
    let g: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(g["block_size"], 1);
    let out = run(&["grouping", &inst, "--constraint", "0", "--block", "9"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_tiny_exact_reaches_the_optimum() {
    let out = run(&["bench", "--suite", "tiny-exact", "--seed", "7", "--cases", "10"], None);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["suite", "case", "seed", "value", "reference", "ratio", "runtime_ms"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 10);
    for r in rows {
        assert!(r[5].parse::<f64>().unwrap() >= 1.0);
    }
    let out = run(&["bench", "--suite", "nope"], None);
    assert_eq!(out.status.code(), Some(1));
}
