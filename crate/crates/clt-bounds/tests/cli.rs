use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_clt-bounds"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(path: &Path, v: &Value) {
    std::fs::write(path, serde_json::to_string_pretty(v).unwrap()).unwrap();
}

#[test]
fn help_on_every_subcommand() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    for sub in [
        "perimeter-table",
        "constant",
        "smoothing-audit",
        "stein-check",
        "simulate",
        "annulus-check",
    ] {
        let out = run(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("--output"), "{sub}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--config", "missing.json"]).status.code(), Some(2));
    // seed is mandatory for stochastic commands
    assert_eq!(run(&["simulate", "--n", "10"]).status.code(), Some(2));
    assert_eq!(run(&["smoothing-audit"]).status.code(), Some(2));
    assert_eq!(run(&["annulus-check", "--figure-one"]).status.code(), Some(2));
    // configuration file and inline flags are exclusive
    assert_eq!(
        run(&["constant", "--config", "x.json", "--gamma-star", "0.4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["constant", "--gamma-star", "-1"]).status.code(), Some(2));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(
        &p,
        "{\"gamma_star\": 0.4, \"kappa\": 1, \"mode\": \"affine\", \"extra\": 1}",
    )
    .unwrap();
    let out = run(&["constant", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("extra"));
}

#[test]
fn perimeter_table_csv_rows() {
    let out = run(&["perimeter-table", "--dmax", "20", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "gamma_bar_rounded_up"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 20);
    assert_eq!(&rows[9][2], "1.179");
}

#[test]
fn half_line_constant_from_flags() {
    let out = run(&["constant", "--gamma-star", "0.3989423", "--kappa", "1", "--affine"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let k = v["result"]["bundle"]["k_value"].as_f64().unwrap();
    assert!(k <= 29.3 && k > 28.7, "{k}");
    assert_eq!(v["verified"], Value::Bool(true));
}

#[test]
fn embedded_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = json(&run(&["simulate", "--n", "40", "--seed", "9", "--count", "16"]));
    let cfg = dir.path().join("sim.json");
    write(&cfg, &first["config"]);
    let second = json(&run(&["simulate", "--config", cfg.to_str().unwrap()]));
    assert_eq!(first, second);

    let first = json(&run(&[
        "constant",
        "--gamma-star",
        "0.5",
        "--kappa",
        "0.5",
        "--general",
        "--gamma0",
        "0.3",
    ]));
    let cfg = dir.path().join("constant.json");
    write(&cfg, &first["config"]);
    assert_eq!(first, json(&run(&["constant", "--config", cfg.to_str().unwrap()])));
}

#[test]
fn seed_is_reported_and_overridable() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["simulate", "--n", "40", "--seed", "9", "--count", "8"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed: 9"));
    let cfg = dir.path().join("sim.json");
    write(&cfg, &json(&out)["config"]);
    let again = run(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "10"]);
    assert_eq!(json(&again)["seed"], Value::from(10));
}

#[test]
fn output_file_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let out = run(&["perimeter-table", "--dims", "1,2", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"].as_array().unwrap().len(), 2);
    // only the artifact remains in the directory
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let missing = dir.path().join("no/such/dir/out.json");
    assert_eq!(
        run(&["perimeter-table", "--dims", "1", "--output", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verification_failure_exits_one_with_witness() {
    // a perimeter bound far too small for the unit ball
    let out = run(&[
        "annulus-check",
        "--set",
        r#"{"type":"ball","center":[0,0],"radius":1}"#,
        "--gamma-star",
        "0.1",
        "--seed",
        "1",
        "--samples",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("annulus measure exceeds"), "{err}");
    assert_eq!(json(&out)["verified"], Value::Bool(false));
}

#[test]
fn smoothing_audit_clean_on_convex_classes() {
    let out = run(&[
        "smoothing-audit",
        "--variants",
        "half_space,ball",
        "--trials",
        "2000",
        "--profiles",
        "6",
        "--seed",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("negative_control"));
    assert!(!text.lines().skip(1).any(|l| l.ends_with("false")));
}

#[test]
fn stein_check_small() {
    let out = run(&["stein-check", "--functions", "sin", "--n", "4", "--pairing-cases", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["slepian"].as_array().unwrap().len(), 1);
    // five random cases plus the saturating sign case
    assert_eq!(v["result"]["pairing"].as_array().unwrap().len(), 6);
}

#[test]
fn worker_count_does_not_change_results() {
    let args = [
        "simulate",
        "--kind",
        "uniform-sphere",
        "--d",
        "3",
        "--n",
        "20",
        "--family",
        "origin-balls",
    ];
    let a = bin()
        .args(args)
        .args(["--seed", "5", "--samples", "200000"])
        .env("CLT_BOUNDS_WORKERS", "1")
        .output()
        .unwrap();
    let b = bin()
        .args(args)
        .args(["--seed", "5", "--samples", "200000"])
        .env("CLT_BOUNDS_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let bad = bin()
        .args(args)
        .args(["--seed", "5"])
        .env("CLT_BOUNDS_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
