use std::path::PathBuf;
use std::process::{Command, Output};

use resdk::bisim::NamedPair;
use resdk::fixtures::{two_agent_example, two_agent_example_core};
use resdk::ModelFile;
use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn resdk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resdk")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn formulas() -> Vec<String> {
    std::fs::read_to_string(corpus("formulas.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

#[test]
fn golden_check() {
    let fig1 = corpus("fig1.json");
    let out = resdk(&["check", "--model", fig1.to_str().unwrap(), "--state", "t", "--formula", "R{1,2}(p & K1 p)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "true");
    let out = resdk(&["check", "--model", fig1.to_str().unwrap(), "--state", "t", "--formula", "K1 p"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "false");
}

#[test]
fn corpus_files_match_fixtures() {
    let fig1 = ModelFile::read(corpus("fig1.json")).unwrap().to_model("fig1").unwrap();
    assert_eq!(fig1, two_agent_example());
    let core = ModelFile::read(corpus("core.json")).unwrap();
    assert_eq!(core, ModelFile::from_model(&two_agent_example_core()));
}

#[test]
fn resolve_reproduces_golden_core() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("core.json");
    let out = resdk(&[
        "resolve",
        "--model",
        corpus("fig1.json").to_str().unwrap(),
        "--group",
        "1,2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        std::fs::read_to_string(out_path).unwrap(),
        std::fs::read_to_string(corpus("core.json")).unwrap()
    );
}

#[test]
fn delta_example() {
    let out = resdk(&["delta", "--target", "2", "--sequence", "1,2;1,3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "1,2");
    let out = resdk(&["delta", "--target", "2", "--sequence", "1,3", "--json"]);
    assert_eq!(json(&out), serde_json::json!(["2"]));
}

#[test]
fn reduce_then_check_agrees_on_corpus() {
    for model in ["fig1.json", "core.json"] {
        let path = corpus(model);
        for f in formulas() {
            let reduced = resdk(&["reduce", "--formula", &f, "--json"]);
            assert_eq!(reduced.status.code(), Some(0), "{f}");
            let reduced = json(&reduced)["reduced"].as_str().unwrap().to_owned();
            let direct = resdk(&["check", "--model", path.to_str().unwrap(), "--formula", &f, "--json"]);
            let via = resdk(&["check", "--model", path.to_str().unwrap(), "--formula", &reduced, "--json"]);
            assert_eq!(direct.status.code(), via.status.code(), "{model}: {f}");
            assert_eq!(json(&direct)["extension"], json(&via)["extension"], "{model}: {f} vs {reduced}");
        }
    }
}

#[test]
fn reduced_corpus_is_resolution_free_without_common_knowledge() {
    for f in formulas().iter().filter(|f| !f.contains('C')) {
        let out = json(&resdk(&["reduce", "--formula", f, "--json"]));
        assert_eq!(out["resolution_free"], Value::Bool(true), "{f}");
    }
}

#[test]
fn search_json_round_trips() {
    let out = resdk(&["search", "--formula", "R{1,2}(p & ~K1 p)", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "witness");
    let file: ModelFile = serde_json::from_value(v["model"].clone()).unwrap();
    let state = v["state"].as_str().unwrap().to_owned();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    std::fs::write(&path, file.to_json()).unwrap();
    assert_eq!(ModelFile::read(&path).unwrap(), file);
    let recheck = resdk(&["check", "--model", path.to_str().unwrap(), "--state", &state, "--formula", "R{1,2}(p & ~K1 p)"]);
    assert_eq!(stdout(&recheck).trim(), "true");
}

#[test]
fn search_exhaustion_exits_one() {
    let out = resdk(&["search", "--formula", "p & ~p", "--max-states", "2", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"], "exhausted");
    assert_eq!(v["max_states"], 2);
}

#[test]
fn countermodel_for_overlapping_common_knowledge() {
    let out = resdk(&[
        "search",
        "--countermodel",
        "--formula",
        "R{1,2} C{1,3} p <-> C{1,3} R{1,2} p",
        "--agents",
        "1,2,3",
        "--max-states",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).starts_with("witness"));
}

#[test]
fn bisim_json_round_trips() {
    let fig1 = corpus("fig1.json");
    let fig1 = fig1.to_str().unwrap();
    let out = resdk(&["bisim", "--left", fig1, "--left-state", "t", "--right", fig1, "--right-state", "v", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let pairs: Vec<NamedPair> = serde_json::from_value(v["relation"].clone()).unwrap();
    assert!(pairs.contains(&NamedPair("t".into(), "v".into())));

    let core = corpus("core.json");
    let out = resdk(&[
        "bisim", "--trans", "--left", core.to_str().unwrap(), "--left-state", "t", "--right", fig1, "--right-state", "t",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "not bisimilar");
}

#[test]
fn closure_lists_members() {
    let out = resdk(&["closure", "--formula", "R{1,2} K1 p", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let members: Vec<String> = serde_json::from_value(json(&out)).unwrap();
    for expected in ["R{1,2} K1 p", "D{1,2} R{1,2} p", "p", "~p"] {
        assert!(members.iter().any(|m| m == expected), "{expected} missing from {members:?}");
    }
    let out = resdk(&["closure", "--formula", "[p] K1 p"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_errors_exit_two_with_location() {
    let fig1 = corpus("fig1.json");
    let fig1 = fig1.to_str().unwrap();
    let out = resdk(&["check", "--model", fig1, "--state", "t", "--formula", "K1 (p &"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("column 8"), "{}", stderr(&out));

    let out = resdk(&["check", "--model", fig1, "--state", "t", "--formula", "K3 p"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("undeclared agent `3` at column 2"), "{}", stderr(&out));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"agents\": [\"1\"],\n  \"states\": [\"a\",]\n}\n").unwrap();
    let out = resdk(&["check", "--model", bad.to_str().unwrap(), "--formula", "p"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let out = resdk(&["check", "--model", fig1, "--state", "x", "--formula", "p"]);
    assert_eq!(out.status.code(), Some(2));

    let out = resdk(&["delta", "--target", "2", "--sequence", "1,2;;1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = resdk(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn axioms_small_run() {
    let out = resdk(&["axioms", "--system", "rd", "--max-states", "2", "--instances", "10", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let v = json(&out);
    assert_eq!(v["system"], "RD");
    assert!(v["schemata"].as_array().unwrap().len() >= 15);

    let out = resdk(&["axioms", "--mutants", "--max-states", "3", "--instances", "40"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let out = resdk(&["axioms", "--schema", "RD1", "--schema", "C1", "--max-states", "2", "--instances", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = resdk(&["axioms", "--schema", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}
