use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hl"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn sem_countdown() {
    let out = hl(&["sem", "--program", "corpus:countdown", "--oracle", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sem"]["inf"], serde_json::json!([[-3], [-2], [-1]]));
    assert_eq!(v["sem"]["e"].as_array().unwrap().len(), 4);
    assert_eq!(v["oracle_agrees"], Value::Bool(true));
    // byte-stable
    assert_eq!(out.stdout, hl(&["sem", "--program", "corpus:countdown", "--oracle", "--json"]).stdout);
}

#[test]
fn sem_skip_is_identity() {
    let v = json(&hl(&["sem", "--program", "skip", "--space", "x=0..2", "--json"]));
    assert_eq!(v["sem"]["e"], serde_json::json!([[[0], [0]], [[1], [1]], [[2], [2]]]));
    assert_eq!(v["sem"]["inf"], serde_json::json!([]));
}

#[test]
fn sem_from_files_and_havoc_diverges_everywhere() {
    let out = hl(&["sem", "--program", "corpus/nested_havoc.json", "--json"]);
    assert_eq!(json(&out)["sem"]["inf"].as_array().unwrap().len(), 25);
    let space = scratch("space.json", r#"{"vars": ["y"], "lo": -3, "hi": 3}"#);
    let prog = scratch("prog.txt", "y = [-oo, oo]; while (y != 0) y = y - 1");
    let out = hl(&["sem", "--program", prog.to_str().unwrap(), "--space", space.to_str().unwrap(), "--json"]);
    assert_eq!(json(&out)["sem"]["inf"].as_array().unwrap().len(), 7);
}

#[test]
fn trace_break_loop() {
    let v = json(&hl(&["trace", "--program", "corpus:break_loop", "--L", "10", "--json"]));
    assert_eq!(v["div_starts"], serde_json::json!([[3], [4], [5]]));
    assert_eq!(v["ok"].as_array().unwrap().len(), 7);
    assert_eq!(v["ok"][0], serde_json::json!([[-4], [-2], [0], [2]]));
}

#[test]
fn check_exit_codes() {
    let leak = hl(&["check", "--program", "corpus:leak", "--json"]);
    assert_eq!(leak.status.code(), Some(1));
    let v = json(&leak);
    assert_eq!(v["verdict"], "fails");
    assert!(!v["witnesses"].as_array().unwrap().is_empty());

    let empty = scratch("empty.json", "[]");
    let out = hl(&["check", "--program", "corpus:leak", "--pre", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let bad = hl(&["sem", "--program", "x = (", "--space", "x=0..1"]);
    assert_eq!(bad.status.code(), Some(2));
    let unknown = hl(&["check", "--program", "skip", "--space", "x=0..1", "--rule", "nope", "--post-oracle", "true"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn principal_ideal_demo() {
    let pre: Vec<Value> = (11..=13)
        .map(|v| serde_json::json!({ "e": (0..=13).map(|s| [[s], [v]]).collect::<Vec<_>>() }))
        .collect();
    let pre = scratch("ten_pre.json", &serde_json::to_string(&pre).unwrap());
    let bound: Vec<[[i64; 1]; 2]> = (0..=13).flat_map(|s| (0..=10).map(move |v| [[s], [v]])).collect();
    let bound = scratch("ten_bound.json", &serde_json::json!({ "e": bound }).to_string());
    let out = hl(&[
        "check",
        "--program",
        "corpus:countdown_to_ten",
        "--rule",
        "principal_ideal",
        "--pre",
        pre.to_str().unwrap(),
        "--bound",
        bound.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["verdict"], "holds");
    assert_eq!(v["direct"], "holds");
}

#[test]
fn structural_rules_from_the_command_line() {
    let out = hl(&["check", "--program", "corpus:countdown", "--rule", "while_upper", "--post-oracle", "terminating"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("while_upper: fails"), "{text}");
    assert!(text.contains("direct check: fails"));

    let out = hl(&["check", "--program", "corpus:countdown", "--rule", "seq", "--post-oracle", "true"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn abstract_and_lattice_lab() {
    let out = hl(&["abstract", "--lattice", "diamond", "--op", "frontier_min", "--set", "0,1,⊤"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "{0, 1}\n");
    let out = hl(&["abstract", "--lattice", "two_level_chains", "--op", "chain_down_star", "--set", "X11,X12,X13", "--json"]);
    assert_eq!(json(&out)["result"], serde_json::json!(["Y1", "X11", "X12", "X13"]));
    let out = hl(&["lattice-lab", "--lattice", "powerset:3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["laws"].as_array().unwrap().iter().all(|l| l["pass"] == true));

    let broken = scratch("broken.json", r#"{"elements": ["a", "b"], "order": [["a", "b"], ["b", "a"]]}"#);
    let out = hl(&["lattice-lab", "--lattice", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("lattice"));
}

#[test]
fn selftest_filter() {
    let out = hl(&["selftest", "--filter", "frontier", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["suite"], "frontier");
    assert_eq!(hl(&["selftest", "--filter", "nothing-matches"]).status.code(), Some(2));
}
