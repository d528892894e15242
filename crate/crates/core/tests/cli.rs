use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gff-cutoff"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn rp_check_on_the_circle_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "rp.json",
        r#"{"command": "rp-check", "geometry": {"kind": "circle", "points": 64},
            "cutoff": {"lambda": 5, "kind": "sharp"}, "output_path": "rp_report.json"}"#,
    );
    let out = run(&["rp-check", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(dir.path(), "rp_report.json");
    assert_eq!(report["verdict"], "rp_fails");
    assert!(report["min_eigenvalue"].as_f64().unwrap() <= -1.0 / 26.0 + 1e-4);
}

#[test]
fn uncut_rp_check_holds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"kernel": "uncut"}"#);
    let out = run(&["rp-check", "--config", &cfg, "-o", "r.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(dir.path(), "r.json")["verdict"], "rp_holds");
}

#[test]
fn default_halfline_witness_is_negative() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["witness", "--kind", "halfline", "-o", "w.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let cert = json(dir.path(), "w.json");
    assert_eq!(cert["kind"], "halfline");
    assert!(cert["value"].as_f64().unwrap() < 0.0);
    assert!(cert["n"].as_u64().unwrap() <= 64);
}

#[test]
fn malformed_config_exits_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in [
        r#"{"geometry": {"kind": "circle", "points": 64, "colour": 1}}"#,
        r#"{"cutoff": {"lambda": -1, "kind": "sharp"}}"#,
        r#"{"geometry": {"kind": "circle", "points": 63}}"#,
        "{ not json",
    ]
    .iter()
    .enumerate()
    {
        let cfg = write(dir.path(), &format!("bad{i}.json"), text);
        let out = run(&["spectrum", "--config", &cfg, "-o", "out.json"], dir.path());
        assert_eq!(out.status.code(), Some(1), "{text}");
        assert!(!dir.path().join("out.json").exists());
        assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    }
}

#[test]
fn error_names_the_offending_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"witness": {"bump": {"width": 0.3, "centre": 1}}}"#,
    );
    let out = run(&["witness", "--kind", "halfline", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("witness.bump.centre"));
}

#[test]
fn construction_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"witness": {"lambda": 0.5}}"#);
    let out = run(
        &["witness", "--kind", "compact", "--config", &cfg, "-o", "w.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("w.json").exists());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "p.json",
        r#"{"phi4": {"couplings": [0.0, 0.01], "num_samples": 2000}, "seed": 9}"#,
    );
    for cmd in [
        vec!["phi4-sweep"],
        vec!["sample"],
        vec!["markov"],
        vec!["witness", "--kind", "compact"],
    ] {
        let mut a = cmd.clone();
        a.extend(["--config", &cfg, "-o", "a.json"]);
        let mut b = cmd.clone();
        b.extend(["--config", &cfg, "-o", "b.json"]);
        assert_eq!(run(&a, dir.path()).status.code(), Some(0));
        assert_eq!(run(&b, dir.path()).status.code(), Some(0));
        assert_eq!(
            std::fs::read(dir.path().join("a.json")).unwrap(),
            std::fs::read(dir.path().join("b.json")).unwrap()
        );
    }
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"seed": 1, "cutoff": {"lambda": 4, "kind": "smooth"}}"#,
    );
    run(&["sample", "--config", &cfg, "-o", "a.json"], dir.path());
    run(&["sample", "--config", &cfg, "--seed", "2", "-o", "b.json"], dir.path());
    let (a, b) = (json(dir.path(), "a.json"), json(dir.path(), "b.json"));
    assert_eq!(a["seed"], 1);
    assert_eq!(b["seed"], 2);
    assert_ne!(a["coefficients"], b["coefficients"]);
}

#[test]
fn csv_views() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["markov", "--format", "csv"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("target,position,delta_sq\n"));
    assert_eq!(text.lines().count(), 32);
    let cfg = write(
        dir.path(),
        "p.json",
        r#"{"phi4": {"couplings": [0.0, 0.1], "num_samples": 500}}"#,
    );
    let out = run(&["phi4-sweep", "--config", &cfg, "--format", "csv"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("c,value,std_error\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn command_mismatch_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"command": "markov"}"#);
    assert_eq!(run(&["spectrum", "--config", &cfg], dir.path()).status.code(), Some(1));
}
