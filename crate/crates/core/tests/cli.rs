use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn treepack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treepack")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn pack_text_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write(dir.path(), "k4.txt", "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    let text = stdout(&treepack(&["pack", &k4]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "2");
    assert_eq!(lines.iter().filter(|l| l.starts_with("# tree")).count(), 2);
    assert!(lines.contains(&"# certificate"));

    let json: serde_json::Value = serde_json::from_str(&stdout(&treepack(&["pack", "--json", &k4]))).unwrap();
    assert_eq!(json["sigma"], 2);
    assert_eq!(json["trees"].as_array().unwrap().len(), 2);
    assert_eq!(json["trees"][0].as_array().unwrap().len(), 3);
    assert!(json["certificate"].as_array().unwrap().len() >= 2);
}

#[test]
fn verify_reports_violation_or_ok() {
    let dir = tempfile::tempdir().unwrap();
    let c4 = write(dir.path(), "c4.txt", "4 4\n0 1\n1 2\n2 3\n3 0\n");
    assert_eq!(stdout(&treepack(&["verify", &c4, "--k", "1"])).trim(), "OK");
    let blocks = stdout(&treepack(&["verify", &c4, "--k", "2"]));
    assert!(blocks.lines().count() >= 2);
}

#[test]
fn gen_is_deterministic_and_readable() {
    let a = stdout(&treepack(&["gen", "--n", "30", "--p", "0.2", "--seed", "11"]));
    let b = stdout(&treepack(&["gen", "--n", "30", "--p", "0.2", "--seed", "11"]));
    assert_eq!(a, b);
    let m: usize = a.lines().next().unwrap().split(' ').nth(1).unwrap().parse().unwrap();
    assert_eq!(a.lines().count(), m + 1);

    let perm = stdout(&treepack(&["gen", "--process", "--n", "6", "--seed", "1"]));
    assert_eq!(perm.lines().count(), 15);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    stdout(&treepack(&["gen", "--n", "12", "--p", "0.5", "--seed", "3", "--out", out.to_str().unwrap()]));
    stdout(&treepack(&["pack", out.to_str().unwrap()]));
}

#[test]
fn stats_record() {
    let dir = tempfile::tempdir().unwrap();
    let star = write(dir.path(), "star.txt", "5 4\n0 1\n0 2\n0 3\n0 4\n");
    let rec: serde_json::Value = serde_json::from_str(&stdout(&treepack(&["stats", &star, "--p", "0.5"]))).unwrap();
    assert_eq!(rec["min_degree"], 1);
    assert_eq!(rec["max_degree"], 4);
    assert_eq!(rec["catlin"], true);
    for key in ["small_count", "separated", "max_degree_ok", "min_degree_ok", "edge_ok"] {
        assert!(rec.get(key).is_some(), "{key}");
    }
}

#[test]
fn experiment_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.cfg", "n = 16, 24\np = logn:1.2\ntrials = 5\nseed = 3\n");
    let out = dir.path().join("out");
    stdout(&treepack(&["experiment", "equality", "--config", &cfg, "--trials", "4", "--out", out.to_str().unwrap()]));
    for f in ["records.csv", "summary.csv", "summary.json", "plot.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    // header plus 2 cells of 4 trials; --trials overrides the file
    assert_eq!(fs::read_to_string(out.join("records.csv")).unwrap().lines().count(), 9);
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "3 1\n1 1\n");
    for args in [
        vec!["pack", bad.as_str()],
        vec!["pack", "/nonexistent"],
        vec!["gen", "--n", "5", "--p", "2", "--seed", "0"],
        vec!["experiment", "hitting", "--n", "8", "--k", "5"],
        vec!["experiment", "dense", "--n", "2"],
    ] {
        let o = treepack(&args);
        assert!(!o.status.success(), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}
