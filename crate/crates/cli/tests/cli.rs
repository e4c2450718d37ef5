//! End-to-end runs of the `bvm` binary and the script runner.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use bvm_cli::session::{Format, Options, Session};
use bvm_cli::{repl, run_script, RunError};
use serde_json::Value;

fn bvm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvm")).args(args).output().unwrap()
}

fn script_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

const WORKED: &str = "algebra B 2\nname x = ^{}\nset y = { x : {a1} }\ncheck los \"x in y\"\n";

#[test]
fn equality_of_a_standard_name_is_unity() {
    let f = script_file("algebra B 2\nhf X={{}}\nname x=^X\neval \"x = x\"\n");
    let out = bvm(&["--format", "json", "run", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    let lines = json_lines(&out);
    let eval = lines.iter().find(|v| v["kind"] == "eval").unwrap();
    assert_eq!(eval["line"], 4);
    assert_eq!(eval["data"]["truth"], serde_json::json!(["a1", "a2"]));
}

#[test]
fn worked_example_passes_on_the_first_atom() {
    let f = script_file(WORKED);
    let out = bvm(&["--format", "json", "run", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let lines = json_lines(&out);
    let check = lines.iter().find(|v| v["kind"] == "check").unwrap();
    assert_eq!(check["pass"], true);
    assert_eq!(check["data"]["truth"], serde_json::json!(["a1"]));
    assert_eq!(check["data"]["per_atom"], serde_json::json!({"a1": true, "a2": false}));
    assert_eq!(lines.last().unwrap(), &serde_json::json!({"kind": "summary", "checks": 1, "failed": 0}));
}

#[test]
fn failed_checks_set_the_exit_status() {
    let f = script_file("name x = ^{}\nset y = { x : {a1} }\ncheck \"x in y\" == 1\ncheck \"x in y\" == {a1}\n");
    let out = bvm(&["run", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL [[x in y]] = {a1}, expected 1"));
    assert!(text.ends_with("2 checks, 1 failed\n"));
}

#[test]
fn malformed_statements_report_their_line() {
    let f = script_file("algebra B 2\n\n# comment\nname = ^{}\neval \"x = x\"\n");
    let out = bvm(&["run", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("error: line 4:"), "{text}");
    assert!(!text.contains("[[x = x]]"));

    let f = script_file("eval \"x in\"\n");
    let out = bvm(&["--format", "json", "run", f.path().to_str().unwrap()]);
    let lines = json_lines(&out);
    assert_eq!(lines[0]["kind"], "error");
    assert_eq!(lines[0]["line"], 1);
    assert!(lines[0]["message"].as_str().unwrap().starts_with("in formula: syntax error at 1:"));
}

#[test]
fn json_output_is_deterministic() {
    let text = format!("{WORKED}maximize \"x in y\" x --rank 2\nescher-check --rank 2 --samples 5\nposet P = forcing 2 2\ncomplete P\nrefined? P\n");
    let f = script_file(&text);
    let run = || bvm(&["--format", "json", "--seed", "7", "run", f.path().to_str().unwrap()]).stdout;
    let first = run();
    assert_eq!(first, run());
    assert!(!String::from_utf8(first).unwrap().contains("elapsed"));
}

#[test]
fn bundled_demo_script_passes() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scripts/demo.bvm");
    let out = bvm(&["run", path]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("warning"), "{text}");
    assert!(text.ends_with("6 checks, 0 failed\n"), "{text}");
}

#[test]
fn one_shot_subcommands() {
    let out = bvm(&["eval", "x in y", "x={}", "y={{}}"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().next(), Some("[[x in y]] = 1"));

    let out = bvm(&["--atoms", "1", "check", "transfer", "forall u in x . u = y", "x={{}}", "y={}"]);
    assert!(out.status.success());

    let out = bvm(&["--format", "json", "descend", "{{},{{}}}", "--rank", "2"]);
    let lines = json_lines(&out);
    assert_eq!(lines[0]["data"]["members"].as_array().unwrap().len(), 4);

    let out = bvm(&["ascend", "{}", "{{}}"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("ascent = "));

    let out = bvm(&["--format", "json", "maximize", "x = y", "x", "y={{}}", "--rank", "1"]);
    let lines = json_lines(&out);
    assert_eq!(lines[0]["data"]["value"], serde_json::json!(["a1", "a2"]));

    let out = bvm(&["escher-check", "--rank", "2", "--samples", "8"]);
    assert!(out.status.success());

    let out = bvm(&["suite", "two-point"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("PASS suite two-point"));

    assert_eq!(bvm(&["suite", "nonexistent"]).status.code(), Some(2));
}

#[test]
fn repl_continues_after_errors() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_bvm")).arg("repl").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(b"name x = ^{}\nbogus\ncheck \"x = x\" == 1\nquit\n").unwrap();
    let out = child.wait_with_output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("error: line 2: unknown statement `bogus`"));
    assert!(text.contains("PASS [[x = x]] = 1"));
    assert!(out.status.success());
}

#[test]
fn algebra_switch_clears_sets_but_keeps_posets() {
    let mut s = Session::new(Options::default()).unwrap();
    let mut out = Vec::new();
    let text = "name x = ^{}\nposet P = antichain 3\nalgebra C from P\ncheck \"x = x\" == 1\n";
    match run_script(&mut s, text, &mut out) {
        Err(RunError::Script(e)) => {
            assert_eq!(e.line, 4);
            assert!(e.message.contains("variable `x`"), "{}", e.message);
        }
        other => panic!("expected a script error, got {other:?}"),
    }
    let shown = String::from_utf8(out).unwrap();
    assert!(shown.contains("algebra C: completion of P, 3 atoms"));
}

#[test]
fn bsystems_over_the_algebra() {
    let mut s = Session::new(Options { atoms: 2, format: Format::Json, ..Options::default() }).unwrap();
    let mut out = Vec::new();
    let text = "bset Y symmdiff\nbsystem S over Y sig(le/2, c0/0, m/2) le=imp-table c0=0 m=meet\nbeval S \"forall x . le(c0,x)\"\nbeval S \"le(x, y)\" x={a1} y={a2}\nbeval S \"forall x . forall y . le(m(x,y), x)\"\n";
    run_script(&mut s, text, &mut out).unwrap();
    let lines: Vec<Value> = String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let truths: Vec<&Value> = lines.iter().filter(|v| v["kind"] == "beval").map(|v| &v["data"]["truth"]).collect();
    assert_eq!(truths, vec![&serde_json::json!(["a1", "a2"]), &serde_json::json!(["a2"]), &serde_json::json!(["a1", "a2"])]);

    let mut out = Vec::new();
    let bad = "bset D discrete 2\nbsystem T over D sig(le/2) le=imp\n";
    assert!(matches!(run_script(&mut s, bad, &mut out), Err(RunError::Script(e)) if e.line == 2));
}

#[test]
fn repl_summary_counts_checks() {
    let mut s = Session::new(Options::default()).unwrap();
    let mut input: &[u8] = b"check \"forall u in x . u in x\" x={{}} == 1\nsuite psi\n";
    let mut out = Vec::new();
    let summary = repl(&mut s, &mut input, &mut out, false).unwrap();
    assert_eq!((summary.checks, summary.failed), (2, 0));
}
