use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graph-inspect"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn empty_input_prints_empty_object() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("empty.jsonl");
    std::fs::write(&p, "").unwrap();
    let o = run(&[
        "inspect-nodes",
        "--nodes",
        p.to_str().unwrap(),
        "--fail-on-inconsistency",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(o.stdout, b"{}\n");
}

#[test]
fn clean_fixture_exits_zero_with_golden_output() {
    let nodes = fixture("knowledge_nodes.jsonl");
    let o = run(&[
        "inspect-nodes",
        "--nodes",
        nodes.to_str().unwrap(),
        "--parallel",
        "--fail-on-inconsistency",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        o.stdout,
        std::fs::read(fixture("knowledge_report.golden.json")).unwrap()
    );
    assert!(stderr(&o).contains("summary kind=nodes groups=2 properties=7"));
}

#[test]
fn inconsistency_exit_code_needs_the_flag() {
    let nodes = fixture("phone_split.jsonl");
    let o = run(&[
        "inspect-nodes",
        "--nodes",
        nodes.to_str().unwrap(),
        "--fail-on-inconsistency",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("inconsistent PHONE.phone: Long=1 String=1"),
        "{}",
        stderr(&o)
    );
    let o = run(&["inspect-nodes", "--nodes", nodes.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn malformed_input_exits_one() {
    let nodes = fixture("malformed.jsonl");
    let o = run(&[
        "inspect-nodes",
        "--nodes",
        nodes.to_str().unwrap(),
        "--fail-on-inconsistency",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(stderr(&o).contains("malformed.jsonl:1"), "{}", stderr(&o));
    assert_eq!(
        run(&["inspect-nodes", "--nodes", "/no/such/file.jsonl"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["inspect-nodes", "--concurrency", "0"]).status.code(),
        Some(1)
    );
}

#[test]
fn debug_lines_go_to_stderr_only() {
    let nodes = fixture("mixed_nodes.jsonl");
    let plain = run(&["inspect-nodes", "--nodes", nodes.to_str().unwrap()]);
    let o = run(&[
        "inspect-nodes",
        "--nodes",
        nodes.to_str().unwrap(),
        "--parallel",
        "--batch-size",
        "2",
        "--debug",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(o.stdout, plain.stdout);
    let progress = stderr(&o)
        .lines()
        .filter(|l| l.starts_with("inspect kind=nodes batch="))
        .count();
    assert_eq!(progress, 4);
    assert!(!stderr(&plain).contains("inspect kind="));
}

#[test]
fn generate_then_inspect_serial_and_parallel_agree() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"node_count": 3000, "rel_count": 6000, "flip_rate": 0.01, "seed": 3,
            "label_schemas": [{"label": "PHONE", "properties": [{"name": "phone", "tag": "String", "alternate": "Long"}]}],
            "rel_schemas": [{"type": "CALLED", "properties": [{"name": "at", "tag": "LocalDateTime", "presence": 0.5}]}]}"#,
    )
    .unwrap();
    let n = dir.path().join("n.jsonl");
    let r = dir.path().join("r.jsonl");
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let o = run(&[
        "generate",
        "--spec",
        &s(&spec),
        "--out-nodes",
        &s(&n),
        "--out-rels",
        &s(&r),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("generated nodes=3000 relationships=6000"));

    for sub in ["inspect-nodes", "inspect-rels"] {
        let serial = run(&[sub, "--nodes", &s(&n), "--rels", &s(&r)]);
        let par = run(&[
            sub,
            "--nodes",
            &s(&n),
            "--rels",
            &s(&r),
            "--parallel",
            "--concurrency",
            "8",
            "--batch-size",
            "7",
        ]);
        assert_eq!(serial.status.code(), Some(0));
        assert_eq!(serial.stdout, par.stdout);
        assert!(serial.stdout.len() > 10);
    }
    let out = dir.path().join("report.json");
    let o = run(&[
        "inspect-nodes",
        "--nodes",
        &s(&n),
        "--output",
        &s(&out),
        "--fail-on-inconsistency",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().contains("\"PHONE\""));
}

#[test]
fn bench_writes_csv() {
    let nodes = fixture("mixed_nodes.jsonl");
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let o = run(&[
        "bench",
        "--nodes",
        nodes.to_str().unwrap(),
        "--concurrencies",
        "1,2",
        "--repetitions",
        "2",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("kind,mode,concurrency,trial,elapsed_ms\n"));
    assert_eq!(text.lines().count(), 1 + 6 + 3);
}
