use std::io::Write;
use std::process::{Command, Stdio};

use serde_json::Value;

fn exalg(args: &[&str], stdin: &str) -> (Value, String, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_exalg"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&text).unwrap_or(Value::Null);
    (json, text, out.status.code().unwrap())
}

const CYCLIC: &str = r#"{"command": "twisted-basis", "input": {"group": {"type": "torus", "rank": 3},
    "automorphism": {"theta": "lattice", "torus_action": [[0,0,1],[1,0,0],[0,1,0]]}}}"#;

#[test]
fn cyclic_torus_basis_from_stdin() {
    let (r, _, code) = exalg(&[], CYCLIC);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["basis"], serde_json::json!([[1, 1, 1]]));
    assert_eq!(r["params"]["length_bound"], 6);
    assert_eq!(r["params"]["degree_bound"], 6);
    assert_eq!(r["params"]["budget"], 500);
    assert_eq!(r["seed"], 0);
}

#[test]
fn flags_override_job_parameters() {
    let (r, _, _) = exalg(&["--seed", "11", "--length-bound", "3", "--degree-bound", "2", "--budget", "40"], CYCLIC);
    assert_eq!(r["seed"], 11);
    assert_eq!(r["params"]["length_bound"], 3);
    assert_eq!(r["params"]["degree_bound"], 2);
    assert_eq!(r["params"]["budget"], 40);
}

#[test]
fn semisimplification_then_same_component() {
    let job = r#"{"command": "semisimplify", "input": {"group": {"generators": ["a", "b"]},
        "images": [[["1","1","0"],["0","1","2"],["0","0","3"]], [["2","0","1"],["0","1","0"],["0","0","1/2"]]]}}"#;
    let (r, _, code) = exalg(&["--length-bound", "4"], job);
    assert_eq!(code, 0, "{r}");
    let left: Value = serde_json::from_str::<Value>(job).unwrap()["input"]["images"].clone();
    let right = r["result"]["images"].clone();
    let cmp = serde_json::json!({"command": "same-component",
        "input": {"group": {"generators": ["a", "b"]}, "left": left, "right": right}});
    let (s, _, code) = exalg(&[], &cmp.to_string());
    assert_eq!(code, 0);
    assert_eq!(s["result"]["same"], true);
    assert_eq!(s["certificates"][0]["length_bound"], 6);
}

#[test]
fn markdown_and_out_file() {
    let path = std::env::temp_dir().join(format!("exalg-cli-test-{}.md", std::process::id()));
    let (_, stdout, code) = exalg(&["--format", "md", "--out", path.to_str().unwrap()], CYCLIC);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let md = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(md.contains("twisted-basis"));
    assert!(md.contains("**Verdict:**"));
    assert!(md.contains("## Certificates\n\n```json\n[]\n```"));
}

#[test]
fn schema_errors_report_a_pointer() {
    let (r, _, code) = exalg(&[], r#"{"command": "hecke-eval", "input": {"group": {"generators": ["a"]},
        "images": [[["1/0"]]], "rep": "std", "word": [1]}}"#);
    assert_eq!(code, 1);
    assert_eq!(r["status"], "error");
    assert_eq!(r["error"]["path"], "/input/images/0/0/0");
    let (r, _, code) = exalg(&[], "{not json");
    assert_eq!(code, 1);
    assert_eq!(r["error"]["kind"], "schema");
}

#[test]
fn json_report_roundtrips() {
    let (r, text, _) = exalg(&[], CYCLIC);
    assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", text);
}

#[test]
fn wall_clock_is_opt_in() {
    let (r, _, _) = exalg(&[], CYCLIC);
    assert_eq!(r["timing"], Value::Null);
    let (r, _, _) = exalg(&["--wall-clock"], CYCLIC);
    assert!(r["timing"]["elapsed_ms"].is_u64());
}

#[test]
fn shipped_schemas_cover_every_command() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/schemas");
    let job: Value = serde_json::from_str(&std::fs::read_to_string(format!("{dir}/job.schema.json")).unwrap()).unwrap();
    let listed: Vec<&str> =
        job["properties"]["command"]["enum"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(listed, exalg_cli::job::COMMANDS);
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{dir}/report.schema.json")).unwrap()).unwrap();
    let (out, _, _) = exalg(&[], CYCLIC);
    let required: Vec<&str> = report["required"].as_array().unwrap().iter().map(|k| k.as_str().unwrap()).collect();
    let mut keys: Vec<&str> = out.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    let mut expected = required.clone();
    expected.sort_unstable();
    assert_eq!(keys, expected);
}
