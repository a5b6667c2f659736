use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn archlayers(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_archlayers")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = archlayers(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn staged_commands_match_run() {
    let tmp = TempDir::new().unwrap();
    let (sys, full, staged) = (tmp.path().join("sys"), tmp.path().join("full"), tmp.path().join("staged"));
    ok(&["synth", "--classes-per-layer", "60", "--seed", "3", "--out", p(&sys)]);
    let metrics = sys.join("metrics.ckjm");
    let edges = sys.join("edges.txt");
    let input = ["--metrics", p(&metrics), "--edges", p(&edges)];

    let mut run = vec!["run", "--out", p(&full), "--truth"];
    let truth = sys.join("truth.csv");
    run.push(p(&truth));
    run.extend(input);
    ok(&run);

    let layers = staged.join("layers.csv");
    let dataset = staged.join("dataset.csv");
    let rules = staged.join("rules.txt");
    for cmd in ["layers", "stats", "discretize"] {
        let mut args = vec![cmd, "--out", p(&staged), "--layers", p(&layers)];
        args.extend(input);
        ok(&args);
    }
    ok(&["rules", "--dataset", p(&dataset), "--out", p(&staged)]);
    ok(&["eval", "--dataset", p(&dataset), "--rules", p(&rules), "--out", p(&staged)]);

    for name in [
        "layers.csv",
        "correlations.csv",
        "correlations.md",
        "descriptive.md",
        "descriptive.csv",
        "dataset.csv",
        "rules.txt",
        "rules.jsonl",
        "accuracy.csv",
        "accuracy.md",
    ] {
        let a = fs::read_to_string(full.join(name)).unwrap();
        let b = fs::read_to_string(staged.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between run and staged commands");
    }
    for name in ["predictions.csv", "truth_accuracy.csv", "truth_accuracy.md", "summary.txt"] {
        assert!(full.join(name).exists(), "{name} missing from report bundle");
    }
}

#[test]
fn layers_of_a_chain() {
    let tmp = TempDir::new().unwrap();
    let edges = tmp.path().join("edges.txt");
    fs::write(&edges, "a.A -> a.B\na.B -> a.C\na.C,a.D\n").unwrap();
    let out = ok(&["layers", "--edges", p(&edges), "--out", p(tmp.path())]);
    assert_eq!(out, "class,dlayer,tentative_layer\na.A,3,4\na.B,2,3\na.C,1,2\na.D,0,1\n");
}

#[test]
fn class_facts_input_runs_end_to_end() {
    let tmp = TempDir::new().unwrap();
    ok(&["synth", "--emit", "class-facts", "--classes-per-layer", "40", "--out", p(tmp.path())]);
    let facts = tmp.path().join("classes.jsonl");
    let truth = tmp.path().join("truth.csv");
    let out = tmp.path().join("report");
    ok(&["run", "--class-facts", p(&facts), "--truth", p(&truth), "--eval", "cv:3", "--out", p(&out)]);
    let accuracy = fs::read_to_string(out.join("accuracy.md")).unwrap();
    assert!(accuracy.contains("3-fold cross-validation"), "{accuracy}");
    let metrics = ok(&["metrics", "--class-facts", p(&facts), "--out", p(tmp.path())]);
    assert_eq!(metrics.lines().count(), 160);
}

#[test]
fn exit_codes_follow_error_categories() {
    let tmp = TempDir::new().unwrap();
    let bad = tmp.path().join("bad.ckjm");
    fs::write(&bad, "a.A 1 2 three 4 5 6 7 8\n").unwrap();
    let edges = tmp.path().join("edges.txt");
    fs::write(&edges, "a.A -> a.B\na.B -> a.C\n").unwrap();
    let parse = archlayers(&["run", "--metrics", p(&bad), "--edges", p(&edges), "--out", p(tmp.path())]);
    assert_eq!(parse.status.code(), Some(2));

    let shallow = archlayers(&["layers", "--edges", p(&edges), "--out", p(tmp.path())]);
    assert_eq!(shallow.status.code(), Some(3), "{}", String::from_utf8_lossy(&shallow.stderr));

    let missing = tmp.path().join("absent.ckjm");
    let io = archlayers(&["run", "--metrics", p(&missing), "--edges", p(&edges), "--out", p(tmp.path())]);
    assert_eq!(io.status.code(), Some(4));

    let usage = archlayers(&["run", "--eval", "cv:1"]);
    assert_eq!(usage.status.code(), Some(2));
}
