use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn cyclid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclid")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn schema() -> jsonschema::JSONSchema {
    let text = include_str!("../schema/report.schema.json");
    let value: Value = serde_json::from_str(text).unwrap();
    jsonschema::JSONSchema::compile(&value).expect("schema compiles")
}

fn json_of(args: &[&str], code: i32) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = cyclid(&all);
    assert_eq!(o.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).expect("valid JSON");
    let s = schema();
    if let Err(errors) = s.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{args:?} output violates the schema: {msgs:#?}");
    }
    v
}

#[test]
fn check_exit_codes() {
    let o = cyclid(&["check", fixture("fig1.cpf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "proof OK (GTC: accepted)");

    let o = cyclid(&["check", fixture("loop0.cpf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("no progressing trace along the cycle \"\" -> \"0\""));

    let o = cyclid(&["check", "/definitely/missing.cpf"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let dir = std::env::temp_dir().join(format!("cyclid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.cpf");
    std::fs::write(&bad, "proof p { node \"\" : |- Add1(x) by weak; }").unwrap();
    let o = cyclid(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:"));
}

#[test]
fn check_json_audits_every_node() {
    let v = json_of(&["check", fixture("fig2.cpf").to_str().unwrap()], 0);
    assert_eq!(v["cuts"], 1);
    assert_eq!(v["gtc"]["verdict"], "accepted");
    assert_eq!(v["audit"].as_array().unwrap().len(), v["nodes"].as_u64().unwrap() as usize);
    let v = json_of(&["check", fixture("loop0.cpf").to_str().unwrap(), "--gtc", "oracle:3"], 2);
    assert_eq!(v["gtc"]["verdict"], "rejected");
    let v = json_of(&["check", fixture("fig1.cpf").to_str().unwrap(), "--system", "clkid-a"], 2);
    assert_eq!(v["gtc"]["verdict"], "skipped");
    assert!(v["violations"].as_array().unwrap().iter().all(|x| x["kind"] == "rule"));
}

#[test]
fn normalize_writes_a_cycle_normal_script() {
    let dir = std::env::temp_dir().join(format!("cyclid-norm-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("cross1.cpf");
    let v = json_of(&["normalize", fixture("cross1.cpf").to_str().unwrap(), "-o", out.to_str().unwrap()], 0);
    assert_eq!(v["was_cycle_normal"], false);
    assert_eq!(v["unfoldings_agree"], true);
    let v = json_of(&["check", out.to_str().unwrap()], 0);
    assert_eq!(v["cycle_normal"], true);
}

#[test]
fn search_exit_codes() {
    let v = json_of(&["search", "Add1(x1, s(y1), z1) |- Add1(s(x1), y1, z1)"], 0);
    assert_eq!(v["outcome"], "found");
    let v = json_of(&["search", "Add2(x, y, z) |- Add1(x, y, z)", "--max-nodes", "5"], 3);
    assert_eq!(v["outcome"], "exhausted");
    assert_eq!(v["budget"]["max_nodes"], 5);
    let o = cyclid(&["search", "Add2(x, y, z) |- Add1(x, y, z)", "--max-nodes", "5"]);
    assert!(stdout(&o).starts_with("EXHAUSTED under strategy focused, budget N=5, H=4, D=10"));
    let o = cyclid(&["search", "forall x. Add1(x, x, x) |-"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn index_eq_eval() {
    let v = json_of(&["index", fixture("fig2.cpf").to_str().unwrap(), "--node", "1"], 0);
    assert_eq!(v["atoms"][0]["index"], 1);
    let v = json_of(&["index", fixture("fig2.cpf").to_str().unwrap(), "--node", "1.0.0.0.0", "--atom", "0"], 0);
    assert_eq!(v["atoms"][0]["index"], "undefined");
    let o = cyclid(&["index", fixture("fig2.cpf").to_str().unwrap(), "--node", "9.9"]);
    assert_eq!(o.status.code(), Some(1));

    let v = json_of(&["eq", "b = s(c)", "b", "c"], 0);
    assert_eq!(v["delta"], serde_json::json!({"kind": "unique", "delta": 1}));
    let v = json_of(&["eq", "x = y, x = s(y)", "x", "y"], 0);
    assert_eq!(v["delta"]["kind"], "ambiguous");

    let v = json_of(&["eval", "Add2(2, 3, 5)"], 0);
    assert_eq!(v["holds"], true);
    let v = json_of(&["eval", "|- Add1(x, x, x)", "--bound", "2"], 0);
    assert_eq!(v["counterexample"]["x"], 1);
}

#[test]
fn custom_definitions_file() {
    let dir = std::env::temp_dir().join(format!("cyclid-defs-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let defs = dir.join("even.defs");
    std::fs::write(&defs, "inductive Even(1) {\n  rule Z: => Even(0);\n  rule S: Even(x) => Even(s(s(x)));\n}\n").unwrap();
    let d = defs.to_str().unwrap();
    let v = json_of(&["--defs", d, "eval", "Even(4)"], 0);
    assert_eq!(v["holds"], true);
    let v = json_of(&["eval", "Even(3)", "--defs", d], 0);
    assert_eq!(v["holds"], false);
    let o = cyclid(&["--defs", d, "eval", "Add1(0, 0, 0)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn report_small_budget_and_corrupted_proof() {
    let v = json_of(&["report", "--max-nodes", "6"], 0);
    assert_eq!(v["verdict"], "with-Cut proof: OK; cut-free search: EXHAUSTED (focused, N=6)");
    let dir = std::env::temp_dir().join(format!("cyclid-report-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("fig2.cpf");
    let text = std::fs::read_to_string(fixture("fig2.cpf")).unwrap().replace("by cut(Add1(x1, s(y1), z1))", "by weak");
    std::fs::write(&bad, text).unwrap();
    let o = cyclid(&["report", "--proof", bad.to_str().unwrap(), "--max-nodes", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.starts_with("with-Cut proof: FAILED; cut-free search: EXHAUSTED (focused, N=4)"));
    assert!(out.contains("node \"1.0.0.0\""));
}
