use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_bigint::BigUint;
use sns_cli::trace::{replay, TraceDocument};
use sns_core::dsl;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/scenarios")
        .join(name)
}

fn sns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sns"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_valid_file_is_silent() {
    let o = sns(&["check", scenario("decimal.sns").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty() && o.stderr.is_empty());
}

#[test]
fn check_reports_double_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        &dir,
        "bad.sns",
        "cao bad {\n  entities: i, j, k;\n  op a: L (i/10) -> (j*1);\n  op b: L (i/10) -> (k*1);\n}\n",
    );
    let o = sns(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("bad.sns:4:12: entity i has two outputs (a, b)"),
        "{err}"
    );
    assert!(err.contains("at most one operator"), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    let o = sns(&["check", "/nonexistent/nope.sns"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sns(&["run", "/nonexistent/nope.sns"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_decimal_defaults() {
    let o = sns(&["run", scenario("decimal.sns").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "c0: 4\nc1: 3\nc2: 2\nmulticardinal: [2, 3, 4]\nlength: 2\nstatus: terminated\n"
    );
}

#[test]
fn permuted_scheduler_gives_the_same_final_lines() {
    let path = scenario("layered.sns");
    let sync = stdout(&sns(&["run", path.to_str().unwrap()]));
    let perm = stdout(&sns(&[
        "run",
        path.to_str().unwrap(),
        "--scheduler",
        "perm:7",
    ]));
    let finals = |s: &str| {
        s.lines()
            .take_while(|l| !l.starts_with("length"))
            .map(str::to_owned)
            .collect::<Vec<_>>()
    };
    assert_eq!(finals(&sync), finals(&perm));
    assert!(sync.starts_with("i: 10\nj: 0\n"));
}

#[test]
fn budget_exhaustion_prints_intermediate_state() {
    let o = sns(&[
        "run",
        scenario("decimal.sns").to_str().unwrap(),
        "--max-steps",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("c0: 4\nc1: 23\nc2: 0\n"));
    assert!(stdout(&o).ends_with("length: 1\nstatus: budget-exhausted\n"));
}

#[test]
fn bad_scheduler_is_a_usage_error() {
    let o = sns(&[
        "run",
        scenario("decimal.sns").to_str().unwrap(),
        "--scheduler",
        "random",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn trace_replays_to_printed_state() {
    let dir = tempfile::tempdir().unwrap();
    for (file, sched) in [
        ("layered.sns", "sync"),
        ("layered.sns", "perm:11"),
        ("rational.sns", "seq"),
    ] {
        let path = scenario(file);
        let trace = dir.path().join("trace.json");
        let o = sns(&[
            "run",
            path.to_str().unwrap(),
            "--scheduler",
            sched,
            "--trace",
            trace.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let json = std::fs::read_to_string(&trace).unwrap();
        let doc = TraceDocument::from_json(&json).unwrap();
        assert_eq!(doc.scheduler, sched);
        let cao = dsl::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let state: Vec<BigUint> = replay(&cao, &doc).unwrap();
        let printed: String = cao
            .entities()
            .iter()
            .zip(&state)
            .map(|(e, v)| format!("{e}: {v}\n"))
            .collect();
        assert!(stdout(&o).starts_with(&printed), "{sched}");
    }
}

#[test]
fn quiet_run_prints_nothing() {
    let o = sns(&["run", "--quiet", scenario("decimal.sns").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn classify_outputs() {
    let o = sns(&["classify", scenario("decimal.sns").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "transforming, deterministic, linear, homogeneous, radix-multiplicity; radix 10
influence: [transforming]
uncertainty: [deterministic]
topology: [linear]
variability: [homogeneous]
kind: [radix-multiplicity]
parameters: radix 10
roles:
  c0: initial
  c1: intermediate
  c2: final
"
    );
    let mixed = stdout(&sns(&["classify", scenario("mixed.sns").to_str().unwrap()]));
    assert!(mixed.starts_with(
        "transforming, deterministic, linear, heterogeneous, radix-multiplicity; radices 2,3,4\n"
    ));
    assert!(mixed.contains("variability: heterogeneous\n"));
    let cyclic = stdout(&sns(&["classify", scenario("loop.sns").to_str().unwrap()]));
    assert!(cyclic.contains("cyclic"));
}

#[test]
fn encode_examples() {
    let o = sns(&["encode", "--value", "234", "--radices", "10,10"]);
    assert_eq!(stdout(&o), "digits: 4,3,2\ndecode: 234\n");
    let o = sns(&[
        "encode",
        "--value",
        "10",
        "--radices",
        "3,3,3",
        "--rates",
        "2,2,2",
    ]);
    assert_eq!(stdout(&o), "digits: 1,0,1,2\ndecode: 10\n");
    let o = sns(&["encode", "--value", "0", "--radices", "10"]);
    assert_eq!(stdout(&o), "digits: 0,0\ndecode: 0\n");
    let o = sns(&[
        "encode",
        "--value",
        "123456789012345678901234567890",
        "--radices",
        "1000",
        "--width",
        "11",
    ]);
    assert_eq!(stdout(&o), "digits: 890,567,234,901,678,345,12,789,456,123,0\ndecode: 123456789012345678901234567890\n");
    let o = sns(&[
        "encode",
        "--value",
        "7",
        "--radices",
        "2,2",
        "--rates",
        "1,1,1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dot_export() {
    let o = sns(&["dot", scenario("decimal.sns").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.matches("shape=ellipse").count(), 3);
    assert_eq!(text.matches("shape=box").count(), 2);
    assert_eq!(text.matches(" -> ").count(), 4);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("layered.dot");
    let o = sns(&[
        "dot",
        scenario("layered.sns").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    let boxes: Vec<&str> = text.lines().filter(|l| l.contains("shape=box")).collect();
    assert_eq!(boxes.len(), 4);
    let labels: Vec<&str> = boxes
        .iter()
        .map(|l| {
            l.split("label=\"")
                .nth(1)
                .unwrap()
                .split(' ')
                .next()
                .unwrap()
        })
        .collect();
    assert_eq!(labels, ["M", "L", "D", "F"]);
}

#[test]
fn detached_entity_has_no_edges() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        &dir,
        "d.sns",
        "cao d { entities: a, b, lone; op x: L (a/2) -> (b*1); }",
    );
    let text = stdout(&sns(&["dot", p.to_str().unwrap()]));
    assert!(text.contains("e2 [shape=ellipse, label=\"lone:0\"];"));
    assert!(!text.contains("e2 ->") && !text.contains("-> e2"));
}
