use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const COORDINATION: &str = r#"{"players": 2, "actions": [2, 2],
  "payoffs": [[[1, 0], [0, 1]], [[1, 0], [0, 1]]]}"#;

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("coordination.json"), COORDINATION).unwrap();
    dir
}

fn run(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_entrodyn"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn qre_at_zero_rationality_is_uniform() {
    let dir = workspace();
    let out = run(
        dir.path(),
        &["qre", "--check"],
        r#"{"game": "coordination.json", "rho": 0}"#,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let j = json(&dir.path().join("out/qre.json"));
    assert_eq!(j["point"]["x"], serde_json::json!([[0.5, 0.5], [0.5, 0.5]]));
    assert_eq!(j["meta"]["command"], "qre");
}

#[test]
fn simulate_check_passes_at_positive_temperature() {
    let dir = workspace();
    let cfg = r#"{"game": "coordination.json", "T": 0.25, "x0": [[0.7, 0.3], [0.4, 0.6]],
        "t_end": 200, "record_every": 100}"#;
    let out = run(dir.path(), &["simulate", "--check"], cfg);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    assert!(csv.starts_with("# entrodyn"));
}

#[test]
fn malformed_configs_exit_with_one() {
    let dir = workspace();
    let out = run(
        dir.path(),
        &["simulate"],
        r#"{"game": "coordination.json", "T": "hot"}"#,
    );
    assert_eq!(out.status.code(), Some(1));
    let out = run(
        dir.path(),
        &["simulate"],
        r#"{"game": "missing.json", "T": 0.1, "t_end": 1}"#,
    );
    assert_eq!(out.status.code(), Some(1));
    let out = run(dir.path(), &["simulate"], "not json");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failed_checks_exit_with_three() {
    let dir = workspace();
    // One time unit is far too short to reach the QRE.
    let cfg =
        r#"{"game": "coordination.json", "T": 0.25, "x0": [[0.7, 0.3], [0.4, 0.6]], "t_end": 1}"#;
    let out = run(dir.path(), &["simulate", "--check"], cfg);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // Without --check the same run succeeds.
    let out = run(dir.path(), &["simulate"], cfg);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn numerical_failures_exit_with_two() {
    let dir = workspace();
    // A step this coarse overshoots the boundary in strategy space.
    let cfg = r#"{"game": "coordination.json", "T": 0, "x0": [[0.9, 0.1], [0.9, 0.1]],
        "t_end": 50, "dt": 5, "space": "strategy"}"#;
    let out = run(dir.path(), &["simulate"], cfg);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn zero_temperature_learning_needs_the_flag() {
    let dir = workspace();
    let cfg = r#"{"game": "coordination.json", "T": 0, "iters": 50,
        "schedule": {"kind": "harmonic", "c": 0.5}}"#;
    let out = run(dir.path(), &["learn"], cfg);
    assert_ne!(out.status.code(), Some(0));
    let out = run(dir.path(), &["learn", "--unsafe-zero-temperature"], cfg);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn outputs_are_deterministic() {
    let cfg = r#"{"game": "coordination.json", "T": 0.2, "iters": 300, "seeds": [4, 5],
        "schedule": {"kind": "shifted-power", "c": 1, "a": 5, "b": 0.6},
        "algorithm": "async", "noise": {"kind": "uniform", "bound": 0.1},
        "revision": {"kind": "bernoulli", "probs": [0.5, 0.5]}, "delay": {"M": 2},
        "initial": "dirichlet"}"#;
    let a = workspace();
    let b = workspace();
    assert_eq!(
        run(a.path(), &["learn", "--seed", "9"], cfg).status.code(),
        Some(0)
    );
    assert_eq!(
        run(b.path(), &["learn", "--seed", "9"], cfg).status.code(),
        Some(0)
    );
    let mut names: Vec<_> = fs::read_dir(a.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        let x = fs::read(a.path().join("out").join(&name)).unwrap();
        let y = fs::read(b.path().join("out").join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
    }
    let c = workspace();
    run(c.path(), &["learn", "--seed", "10"], cfg);
    let summary = |d: &Path| fs::read(d.join("out/summary.json")).unwrap();
    assert_ne!(summary(a.path()), summary(c.path()));
}

#[test]
fn fig2_started_at_a_qre_counts_it_converged() {
    let dir = workspace();
    let cfg = r#"{"game": "coordination.json", "replicates": 1, "checkpoints": [0, 5],
        "initial": [[0.5, 0.5], [0.5, 0.5]], "bootstrap_resamples": 20}"#;
    let out = run(dir.path(), &["fig2"], cfg);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let j = json(&dir.path().join("out/summary.json"));
    assert_eq!(j["fractions"][0], 1.0);
    assert_eq!(j["replicates"], 1);
}

#[test]
fn bifurcation_finds_the_critical_temperature() {
    let dir = workspace();
    let cfg =
        r#"{"game": "coordination.json", "temperatures": {"min": 0.3, "max": 0.7, "count": 41}}"#;
    let out = run(dir.path(), &["bifurcate", "--check"], cfg);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let j = json(&dir.path().join("out/critical.json"));
    let estimate = j["critical"][0]["estimate"].as_f64().unwrap();
    assert!((estimate - 0.5).abs() < 0.01, "{estimate}");
}

#[test]
fn unknown_commands_are_rejected() {
    let dir = workspace();
    let out = run(dir.path(), &["frobnicate"], "{}");
    assert_ne!(out.status.code(), Some(0));
}
