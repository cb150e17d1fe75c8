use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thinlayer"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    bin().args(args).arg("--config").arg(cfg).arg("--out-dir").arg(out).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A cheap problem on a small kite.
const SMALL: &str = r#"{
    "curve": {"kind": "kite"},
    "placement": "natural",
    "n_nodes": 96,
    "thickness": {"mean": 1.0},
    "materials": {
        "background": {"lambda": 1.0, "mu": 1.0},
        "core": {"lambda": 3.0, "mu": 2.0},
        "layer": {"lambda": 5.0, "mu": 4.0}
    },
    "background": {"kind": "linear", "gradient": [[0.3, 1.0], [-0.2, -0.7]]},
    "epsilon": 0.1,
    "ladder": [0.2, 0.1],
    "probes": {"inner": 1.5, "outer": 2.5, "count": 8},
    "jumps": {"delta": 0.001, "stride": 8},
    "tasks": ["solve", "check-jumps"]
}"#;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn coated_disk_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run"], &config("coated_disk.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("PASS oracle-compare"));
    let csv = fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    assert!(csv.starts_with("x,y,u_x,u_y,oracle_x,oracle_y,relative_error,"));
    assert_eq!(csv.lines().count(), 65);
}

#[test]
fn zero_contrast_config_passes_at_the_floor() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", "--quiet"], &config("zero_contrast.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let csv = fs::read_to_string(dir.path().join("thm11.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(v[1] <= 1e-9 && v[2] <= 1e-9, "{line}");
    }
}

#[test]
fn certify_thm11_writes_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = run(&["certify-thm11"], &cfg, dir.path());
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("thm11.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("epsilon,e0,e1,slope0,slope1"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][0], rows[1][0]), (0.2, 0.1));
    assert!(rows.iter().all(|r| r.len() == 5 && r[1] > r[2]));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("certify-thm11.json")).unwrap()).unwrap();
    assert_eq!(summary["task"], "certify-thm11");
    assert_eq!(summary["pass"].as_bool(), Some(o.status.code() == Some(0)));
}

#[test]
fn check_jumps_reports_the_violation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    // the hypersingular limit needs the finer grid
    let o = run(&["check-jumps", "--n-nodes", "256"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("check-jumps: max violation"), "{out}");
    let csv = fs::read_to_string(dir.path().join("jumps.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn invalid_config_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("\"ladder\": [0.2, 0.1]", "\"ladder\": [0.1, 0.2]", "ladder"),
        ("\"n_nodes\": 96", "\"n_nodes\": 9", "n_nodes"),
        ("\"mean\": 1.0", "\"mean\": 0.0", "thickness"),
        ("\"stride\": 8", "\"stride\": 0", "jumps"),
    ];
    for (from, to, name) in cases {
        let cfg = write_config(dir.path(), &SMALL.replace(from, to));
        let o = run(&["run"], &cfg, dir.path());
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(stderr(&o).contains(name), "{}", stderr(&o));
    }
    let o = run(&["run"], &dir.path().join("missing.json"), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_compare_rejects_a_kite() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = run(&["oracle-compare"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("curve"));
}

#[test]
fn node_override_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = bin()
        .args(["solve", "--n-nodes", "15", "--config"])
        .arg(&cfg)
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n_nodes"));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["run", "--quiet"], &cfg, out);
        assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
    }
    for name in ["solve.csv", "solve.json", "jumps.csv", "check-jumps.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn solve_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let o = run(&["solve", "--quiet"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("solve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,u_x,u_y,zeroth_x,zeroth_y,first_x,first_y"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        // the first-order field is closer to the coated one than the bare one
        let e0 = (r[2] - r[4]).hypot(r[3] - r[5]);
        let e1 = (r[2] - r[6]).hypot(r[3] - r[7]);
        assert!(e1 < e0, "{r:?}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("solve.json")).unwrap()).unwrap();
    assert_eq!(summary["report"]["epsilon"].as_f64(), Some(0.1));
}

#[test]
fn kite_config_passes_and_matches_the_frozen_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run"], &config("kite_theorem11.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 4, "{}", stdout(&o));
    let parse = |text: &str| -> Vec<Vec<f64>> {
        text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
    };
    let got = parse(&fs::read_to_string(dir.path().join("thm11.csv")).unwrap());
    let want = parse(include_str!("golden/kite_theorem11_thm11.csv"));
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        for (a, b) in g.iter().zip(w) {
            assert!((a - b).abs() <= 1e-8 * b.abs(), "{a:e} vs {b:e}");
        }
    }
    assert!(got[0][3] >= 0.9 && got[0][4] >= 1.4);
}
