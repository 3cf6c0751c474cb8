use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn polycat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polycat")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn encode_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["encode"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &path]);
    let out = polycat(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn encode_worked_example() {
    let out = polycat(&["encode", "x^3y + 2 ; 3x^2z + y", "--in", "w,x,y,z"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["A"].as_array().unwrap().len(), 14);
    assert_eq!(v["B"].as_array().unwrap().len(), 7);
    assert_eq!(v["src"], json!(["w", "x", "y", "z"]));
}

#[test]
fn encode_rejects_bad_text() {
    assert_eq!(polycat(&["encode", "x +", "--in", "x"]).status.code(), Some(2));
    assert_eq!(polycat(&["encode", "x", "--in", "y"]).status.code(), Some(2));
}

#[test]
fn encode_then_decode_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let file = encode_to(dir.path(), "p.json", &["x^3y + 2 ; 3x^2z + y", "--in", "w,x,y,z", "--out", "f,g"]);
    let out = polycat(&["decode", &file]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["out"], json!(["f", "g"]));
    assert_eq!(v["outputs"].as_array().unwrap().len(), 2);

    let out = polycat(&["eval", &file, "--assign", "x=2,y=3,z=5,w=7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!({ "f": 26, "g": 63 }));

    let out = polycat(&["eval", &file, "--assign", "x=2,y=3", "--trace"]);
    assert_eq!(out.status.code(), Some(4));
    let out = polycat(&["eval", &file, "--assign", "x=2,y=3,z=5,w=7", "--trace"]);
    let v = stdout_json(&out);
    assert_eq!(v["counts"]["g"], json!(63));
    assert!(v["trace"]["C4_to_B"].is_array());
}

#[test]
fn identity_echoes_assignment() {
    let dir = tempfile::tempdir().unwrap();
    let file = encode_to(dir.path(), "id.json", &["x", "--in", "x", "--out", "x"]);
    let out = polycat(&["eval", &file, "--assign", "x=9"]);
    assert_eq!(stdout_json(&out), json!({ "x": 9 }));
}

#[test]
fn compose_substitutes_and_checks_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let p = encode_to(dir.path(), "p.json", &["x^2 + 1", "--in", "x", "--out", "y"]);
    let q = encode_to(dir.path(), "q.json", &["y^2 + 1", "--in", "y", "--out", "z"]);
    let qp = dir.path().join("qp.json").to_string_lossy().into_owned();
    let out = polycat(&["compose", &p, &q, "-o", &qp]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = polycat(&["eval", &qp, "--assign", "x=3"]);
    assert_eq!(stdout_json(&out), json!({ "z": 101 }));

    let out = polycat(&["compose", &p]);
    assert_eq!(stdout_json(&out), serde_json::from_str::<Value>(&fs::read_to_string(&p).unwrap()).unwrap());

    assert_eq!(polycat(&["compose", &p, &p]).status.code(), Some(3));
    let out = polycat(&["compose", &p, &q, "--trace"]);
    assert!(stdout_json(&out)["terminal"]["levels"].is_array());
}

#[test]
fn compose_spans() {
    let dir = tempfile::tempdir().unwrap();
    let s1 = json!({
        "src": ["a"], "A": ["s", "t"], "B": ["s", "t"], "tgt": ["b", "c"],
        "p1": [["s", "a"], ["t", "a"]], "p2": [["s", "s"], ["t", "t"]], "p3": [["s", "b"], ["t", "c"]],
    });
    let s2 = json!({
        "src": ["b", "c"], "A": ["u", "v", "w"], "B": ["u", "v", "w"], "tgt": ["d"],
        "p1": [["u", "b"], ["v", "b"], ["w", "c"]], "p2": [["u", "u"], ["v", "v"], ["w", "w"]], "p3": [["u", "d"], ["v", "d"], ["w", "d"]],
    });
    let (f1, f2) = (dir.path().join("s1.json"), dir.path().join("s2.json"));
    fs::write(&f1, s1.to_string()).unwrap();
    fs::write(&f2, s2.to_string()).unwrap();
    let out = polycat(&["compose", f1.to_str().unwrap(), f2.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["A"], v["B"]);
    assert_eq!(v["A"].as_array().unwrap().len(), 3);
}

#[test]
fn malformed_input_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(polycat(&["decode", bad.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&bad, json!({ "src": [] }).to_string()).unwrap();
    assert_eq!(polycat(&["eval", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn check_passes_and_is_deterministic() {
    let run = || {
        let out = polycat(&["check", "--law", "all", "--seed", "42", "--size", "3", "--cases", "100"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        let mut v = stdout_json(&out);
        assert_eq!(v["failures"], json!(0));
        for r in v["reports"].as_array_mut().unwrap() {
            r["wall_ms"] = json!(0);
        }
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn check_degenerate_and_paranoid() {
    let out = polycat(&["check", "--law", "delta-criterion", "--size", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let out = polycat(&["--paranoid", "check", "--law", "coherence", "--cases", "20"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(polycat(&["check", "--size", "0"]).status.code(), Some(2));
    assert_eq!(polycat(&["check", "--law", "nope"]).status.code(), Some(2));
}

#[test]
fn injected_defect_is_reported() {
    let out = polycat(&["check", "--law", "delta-criterion", "--cases", "30", "--mutant", "drop-pi-section"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    let f = &v["reports"][0]["failures"][0];
    assert!(f["counterexample"]["p"].is_object());
}

#[test]
fn list_laws_names_every_law() {
    let out = polycat(&["list-laws"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 21);
    assert!(text.lines().any(|l| l.starts_with("pentagon\tpoly\t")));
}
