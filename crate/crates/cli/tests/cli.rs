use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubeprogress")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cube_apply_and_inverse() {
    let out = ok(&["cube", "apply", "R U R' U' U R U' R'"]);
    assert!(out.contains("solved: true"), "{out}");
    let out = ok(&["cube", "apply", "R U"]);
    assert!(out.contains("solved: false"));
    let sexy = "R U R' U' ".repeat(6);
    assert!(ok(&["cube", "apply", &sexy]).contains("solved: true"));
    assert!(!run(&["cube", "apply", "R X"]).status.success());
}

#[test]
fn cube_scramble_is_seeded() {
    let a = ok(&["cube", "scramble", "--k", "25", "--seed", "4"]);
    let b = ok(&["cube", "scramble", "--k", "25", "--seed", "4"]);
    let c = ok(&["cube", "scramble", "--k", "25", "--seed", "5"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.lines().next().unwrap().split_whitespace().count(), 25);
}

#[test]
fn shells_to_stdout() {
    let out = ok(&["shells", "--n", "2", "--depth", "3"]);
    let counts: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(out.lines().next(), Some("r,S,gamma,H,b,ci"));
    assert_eq!(counts, ["1", "9", "54", "321"]);
    let out = ok(&["shells", "--n", "3", "--depth", "3"]);
    assert!(out.lines().nth(4).unwrap().starts_with("3,3240,"));
    assert!(!run(&["shells", "--n", "3", "--depth", "3", "--budget", "lots"]).status.success());
}

#[test]
fn walk_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("walk.json");
    ok(&["walk", "--pf", "0.75,1", "--trials", "2000", "--seed", "3", "-o", path(&out)]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    assert_eq!(runs[1]["outcome"]["mean_steps"].as_f64(), Some(20.0));
    let m = runs[0]["outcome"]["mean_steps"].as_f64().unwrap();
    assert!((m - 40.0).abs() < 2.0, "{m}");
    assert!(!run(&["walk", "--pf", "1.5"]).status.success());
}

#[test]
fn fit_then_learning_curve() {
    let dir = tempfile::tempdir().unwrap();
    let fits = dir.path().join("fits.json");
    ok(&["fit", "--input", path(&fixture("series_progress.csv")), "--family", "progress_eq2", "-o", path(&fits)]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&fits).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
    let lc = ok(&["learning-curve", "--from", path(&fits), "--horizon", "10"]);
    let mut lines = lc.lines();
    assert_eq!(lines.next(), Some("label,T,p_f"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 80);
    assert!(rows.iter().all(|r| (0.5..1.0).contains(&r[2].parse::<f64>().unwrap())));

    let all = ok(&["fit", "--input", path(&fixture("series_exponential.csv"))]);
    let all: Value = serde_json::from_str(&all).unwrap();
    assert_eq!(all.as_array().unwrap().len(), 8);
}

#[test]
fn collapse_reports_dispersion() {
    let out = run(&["collapse", "--input", path(&fixture("series_progress.csv")), "--events", "3,4,5,6,7"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dispersion"));
}

#[test]
fn changepoint_reads_plain_values() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("values.csv");
    let values: Vec<String> =
        (0..30).map(|i| (if i % 2 == 0 { 1.0 } else { -1.0 } * if i < 12 { 1.0 } else { 10.0 }).to_string()).collect();
    std::fs::write(&input, format!("value\n{}\n", values.join("\n"))).unwrap();
    let out = ok(&["changepoint", "--input", path(&input), "--perms", "199", "--seed", "7"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["index"], 12);
    assert_eq!(v["significant"], true);
    let seg = ok(&["changepoint", "--input", path(&input), "--perms", "199", "--centering", "segment"]);
    assert!(seg.contains("\"index\""));
}

#[test]
fn extract_writes_series_csv() {
    let out = ok(&["extract", "--records", path(&fixture("mixed_events.csv")), "--events", "333,444"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "label,T,y,kind");
    assert_eq!(lines[1..], ["3,1,19.5,time", "3,2,18.5,time", "4,1,60,time", "4,2,55,time"]);
    let tsv = ok(&["extract", "--records", path(&fixture("three_rows.tsv")), "--strict"]);
    assert_eq!(tsv.lines().count(), 4);
}

#[test]
fn network_emits_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("graph.dot");
    let out = ok(&["network", "--records", path(&fixture("records.csv")), "--emit", path(&dot)]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v.to_string().contains("\"3b\""));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("graph competitors {"));
    assert!(text.contains("group="));
}

#[test]
fn pipeline_exit_status() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("pipeline_shells.toml"), dir.path().join("pipeline_shells.toml")).unwrap();
    ok(&["pipeline", "--config", path(&dir.path().join("pipeline_shells.toml"))]);
    assert!(dir.path().join("out/manifest.json").exists());

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "output_dir = 'o'\n[[analyses]]\nkind = 'collapse'\n").unwrap();
    let out = run(&["pipeline", "--config", path(&bad)]);
    assert!(!out.status.success());
    assert!(dir.path().join("o/manifest.json").exists());
}

#[test]
fn help_lists_subcommands() {
    let out = ok(&["--help"]);
    for sub in
        ["cube", "shells", "walk", "fit", "collapse", "learning-curve", "changepoint", "extract", "network", "pipeline"]
    {
        assert!(out.contains(sub), "{sub}");
    }
}
