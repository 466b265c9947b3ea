use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qualibd_testkit::check_svg;
use qualibd_testkit::dot::check_dot;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn qualibd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qualibd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exited normally")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn clean_model_is_silent() {
    let out = qualibd(&["validate", fixture("clean.qbd").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty() && out.stderr.is_empty());
    let out = qualibd(&[
        "validate",
        "--verbose",
        fixture("clean.qbd").to_str().unwrap(),
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("0 error(s), 0 warning(s)"));
}

#[test]
fn duplicate_edges_print_one_error() {
    let out = qualibd(&["validate", fixture("dup-edges.json").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    let errors: Vec<&str> = text.lines().filter(|l| l.contains("error[")).collect();
    assert_eq!(errors.len(), 1, "{text}");
    assert!(errors[0].contains("duplicate-edge"));
}

#[test]
fn json_output_is_the_diagnostics_wire_shape() {
    let out = qualibd(&[
        "validate",
        "--json",
        fixture("warnings.qbd").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let items = value.as_array().unwrap();
    assert_eq!(items.len(), 3);
    for item in items {
        let mut keys: Vec<&str> = item
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        keys.sort();
        assert_eq!(keys, ["message", "rule", "severity", "target"]);
    }
}

#[test]
fn parse_errors_carry_positions() {
    let out = qualibd(&[
        "validate",
        fixture("unknown-identifier.qbd").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("unknown-identifier.qbd:3:19: unknown identifier G9"),
        "{err}"
    );
}

#[test]
fn fmt_check_and_rewrite() {
    assert_eq!(
        code(&qualibd(&[
            "fmt",
            "--check",
            fixture("noncanonical.qbd").to_str().unwrap()
        ])),
        1
    );
    assert_eq!(
        code(&qualibd(&[
            "fmt",
            "--check",
            fixture("clean.qbd").to_str().unwrap()
        ])),
        0
    );
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("m.qbd");
    std::fs::copy(fixture("noncanonical.qbd"), &copy).unwrap();
    assert_eq!(code(&qualibd(&["fmt", copy.to_str().unwrap()])), 0);
    assert_eq!(
        std::fs::read_to_string(&copy).unwrap(),
        std::fs::read_to_string(fixture("clean.qbd")).unwrap()
    );
    assert_eq!(
        code(&qualibd(&["fmt", "--check", copy.to_str().unwrap()])),
        0
    );
}

#[test]
fn render_writes_dot_and_svg() {
    let out = qualibd(&[
        "render",
        fixture("clean.qbd").to_str().unwrap(),
        "--format",
        "dot",
    ]);
    assert_eq!(code(&out), 0);
    let summary = check_dot(&stdout(&out)).unwrap();
    assert_eq!((summary.nodes, summary.edges), (6, 6));

    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("m.svg");
    let out = qualibd(&[
        "render",
        fixture("dangling.json").to_str().unwrap(),
        "--format",
        "svg",
        "-o",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    check_svg(&std::fs::read_to_string(target).unwrap()).unwrap();
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["frobnicate"][..],
        &[],
        &["validate"],
        &["validate", "--nope", "x.qbd"],
        &["render", "x.qbd", "--format", "png"],
        &["serve", "--port", "notaport"],
    ] {
        assert_eq!(code(&qualibd(args)), 64, "{args:?}");
    }
    assert_eq!(code(&qualibd(&["--help"])), 0);
    assert_eq!(code(&qualibd(&["--version"])), 0);
}

#[test]
fn missing_files_are_load_failures() {
    assert_eq!(code(&qualibd(&["validate", "/nonexistent/m.qbd"])), 2);
}
