use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn feedscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_feedscope"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = feedscope(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    stdout(&o)
}

fn code(args: &[&str]) -> i32 {
    feedscope(args).status.code().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn fixture(dir: &TempDir, name: &str, file: &str) -> PathBuf {
    write(dir, file, &ok(&["fixture", name]))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn fixture_listing() {
    let out = ok(&["fixture"]);
    for name in ["twostock", "armsrace", "strongest-path-miss"] {
        assert!(out.contains(name), "{out}");
    }
    assert_eq!(code(&["fixture", "nosuch"]), 1);
}

#[test]
fn simulate_prints_every_step() {
    let dir = TempDir::new().unwrap();
    let model = fixture(&dir, "twostock", "twostock.sdm");
    let out = ok(&["simulate", s(&model)]);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("time,"));
    assert_eq!(lines.len(), 12);
    assert!(lines[1].starts_with("1.0,"));
    assert!(lines[11].starts_with("11.0,"));

    let out = ok(&["simulate", s(&model), "--stop", "3"]);
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let model = fixture(&dir, "twostock", "twostock.sdm");
    assert_eq!(code(&[]), 1);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["analyze", s(&model), "--threshold", "2"]), 1);
    assert_eq!(code(&["analyze", s(&model), "--cap", "0"]), 1);
    assert_eq!(code(&["simulate", s(&model), "--dt", "-1"]), 1);

    let broken = write(&dir, "broken.sdm", "STOCK x = 1 { inflow: nowhere }\n");
    let o = feedscope(&["analyze", s(&broken)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("broken.sdm:1:"), "{}", stderr(&o));

    let o = feedscope(&["simulate", s(&dir.path().join("missing.sdm"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("file not found"));
}

#[test]
fn analyze_arms_race() {
    let dir = TempDir::new().unwrap();
    let model = fixture(&dir, "armsrace", "armsrace.sdm");
    let v = json(&ok(&[
        "analyze",
        s(&model),
        "--method",
        "exhaustive",
        "--threshold",
        "0",
    ]));
    assert_eq!(v["metadata"]["provenance"], "exhaustive");
    assert_eq!(v["metadata"]["loops_found"], 8);
    let ranking = v["ranking"].as_array().unwrap();
    assert_eq!(ranking.len(), 8);
    let balancing = ranking.iter().filter(|r| r["polarity"] == "balancing").count();
    let reinforcing = ranking.iter().filter(|r| r["polarity"] == "reinforcing").count();
    assert_eq!((balancing, reinforcing), (3, 5));
}

#[test]
fn analyze_two_stock_outputs() {
    let dir = TempDir::new().unwrap();
    let model = fixture(&dir, "twostock", "twostock.sdm");
    let (out, csv, catalog, scores) = (
        dir.path().join("out.json"),
        dir.path().join("loops.csv"),
        dir.path().join("catalog.json"),
        dir.path().join("scores.csv"),
    );
    let printed = ok(&[
        "analyze",
        s(&model),
        "--threshold",
        "0.001",
        "--out",
        s(&out),
        "--csv",
        s(&csv),
        "--catalog",
        s(&catalog),
        "--scores",
        s(&scores),
    ]);
    assert!(printed.is_empty());
    let v = json(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(v["metadata"]["loops_found"], 3);
    assert_eq!(v["metadata"]["loops_retained"], 2);
    assert!(v["ranking"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["cycle"].as_array().unwrap().len() == 2));

    let csv = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(csv.lines().next(), Some("time,loop_id,score,relative"));
    assert_eq!(csv.lines().count(), 1 + 11 * 2);
    let scores = std::fs::read_to_string(&scores).unwrap();
    assert_eq!(scores.lines().next(), Some("time,src,dst,score"));
    assert_eq!(scores.lines().count(), 1 + 11 * 6);
    let catalog = json(&std::fs::read_to_string(&catalog).unwrap());
    assert_eq!(catalog["loops"].as_array().unwrap().len(), 3);
}

#[test]
fn dense_model_falls_back_to_strongest_path() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("dense.sdm");
    ok(&["gen-synthetic", "--stocks", "8", "--seed", "3", "--out", s(&model)]);
    let v = json(&ok(&["analyze", s(&model), "--stride", "20"]));
    assert_eq!(v["metadata"]["cap_exceeded"], true);
    assert_eq!(v["metadata"]["provenance"], "strongest-path");
    assert_eq!(v["metadata"]["passes"], 5);

    let o = feedscope(&["analyze", s(&model), "--method", "exhaustive"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cap exceeded"), "{}", stderr(&o));
}

#[test]
fn generator_is_deterministic() {
    let a = ok(&["gen-synthetic", "--stocks", "5", "--density", "0.5", "--seed", "9"]);
    let b = ok(&["gen-synthetic", "--stocks", "5", "--density", "0.5", "--seed", "9"]);
    let c = ok(&["gen-synthetic", "--stocks", "5", "--density", "0.5", "--seed", "10"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(code(&["gen-synthetic", "--stocks", "1"]), 1);
}

#[test]
fn graph_loops_cases() {
    let dir = TempDir::new().unwrap();
    let graph = fixture(&dir, "strongest-path-miss", "miss.csv");
    let v = json(&ok(&[
        "graph-loops",
        s(&graph),
        "--start",
        "a",
        "--method",
        "strongest-path",
    ]));
    assert_eq!(v["provenance"], "strongest-path");
    assert_eq!(v["loops"].as_array().unwrap().len(), 1);
    assert_eq!(v["loops"][0]["cycle"], serde_json::json!(["a", "d", "c"]));
    assert_eq!(v["loops"][0]["discovery_score"], 100.0);

    let v = json(&ok(&["graph-loops", s(&graph)]));
    assert_eq!(v["provenance"], "exhaustive");
    assert!(v["loops"].as_array().unwrap().len() >= 2);

    assert_eq!(code(&["graph-loops", s(&graph), "--start", "z"]), 1);
    assert_eq!(
        code(&["graph-loops", s(&graph), "--method", "exhaustive", "--cap", "1"]),
        3
    );

    let empty = write(&dir, "empty.csv", "src,dst,weight\n");
    let v = json(&ok(&["graph-loops", s(&empty)]));
    assert_eq!(v["loops"].as_array().unwrap().len(), 0);

    let bad = write(&dir, "bad.csv", "src,dst,weight\na,b,heavy\n");
    let o = feedscope(&["graph-loops", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.csv:2:"), "{}", stderr(&o));
}

#[test]
fn compare_heuristic_against_exhaustive() {
    let dir = TempDir::new().unwrap();
    let graph = fixture(&dir, "strongest-path-miss", "miss.csv");
    let full = dir.path().join("full.json");
    let partial = dir.path().join("partial.json");
    ok(&["graph-loops", s(&graph), "--method", "exhaustive", "--out", s(&full)]);
    ok(&[
        "graph-loops",
        s(&graph),
        "--start",
        "a",
        "--method",
        "strongest-path",
        "--out",
        s(&partial),
    ]);

    let v = json(&ok(&["compare", s(&full), s(&partial), s(&graph), "--top", "1"]));
    assert_eq!(v["intersection"], 1);
    assert_eq!(v["top"][0]["cycle"], serde_json::json!(["a", "b", "c"]));
    assert_eq!(v["top"][0]["present"], false);
    assert_eq!(v["near_misses"][0]["closest"], serde_json::json!(["a", "d", "c"]));

    let same = json(&ok(&["compare", s(&full), s(&full), s(&graph)]));
    assert_eq!(same["intersection"], same["reference_size"]);

    let garbage = write(&dir, "garbage.json", "{");
    assert_eq!(code(&["compare", s(&garbage), s(&full), s(&graph)]), 2);
    let model = fixture(&dir, "twostock", "twostock.sdm");
    assert_eq!(code(&["compare", s(&full), s(&full), s(&model)]), 2);
}

#[test]
fn compare_on_a_model() {
    let dir = TempDir::new().unwrap();
    let model = fixture(&dir, "armsrace", "armsrace.sdm");
    let catalog = dir.path().join("catalog.json");
    ok(&["analyze", s(&model), "--catalog", s(&catalog)]);
    let v = json(&ok(&["compare", s(&catalog), s(&catalog), s(&model), "--top", "3"]));
    assert_eq!(v["reference_size"], 8);
    assert_eq!(v["intersection"], 8);
    assert_eq!(v["top"].as_array().unwrap().len(), 3);
    assert!(v["near_misses"].as_array().unwrap().is_empty());
}
