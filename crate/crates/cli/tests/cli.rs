//! Black-box tests of the command-line interface: exit-code contract, output
//! formats, and rerun determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_longswap"))
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("longswap-test-{name}-{}.json", std::process::id()));
    std::fs::write(&path, body).expect("config written");
    path
}

#[test]
fn verify_operators_passes_by_default() {
    let out = run(&["verify-operators"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert_eq!(report["config"]["mu"][0], "1/3");
}

#[test]
fn tampered_operators_fail() {
    let out = run(&["verify-operators", "--tamper"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    assert_eq!(report["pass"], serde_json::Value::Bool(false));
}

#[test]
fn mu_species_mismatch_is_a_config_error() {
    let config = write_config("mismatch", r#"{"species": 3, "mu": ["1/3", "2/5"]}"#);
    let out = run(&["verify-operators", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(config);
}

#[test]
fn unknown_config_fields_are_rejected() {
    let config = write_config("unknown", r#"{"specis": 2}"#);
    let out = run(&["verify-operators", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(config);
}

#[test]
fn ybe_report_lists_zero_deviations() {
    let config = write_config("ybe3", r#"{"species": 3, "mu": ["1/3", "1/2", "4/5"]}"#);
    let out = run(&[
        "verify-ybe",
        "--config",
        config.to_str().unwrap(),
        "--points",
        "6",
        "--seed",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    let points = report["points"].as_array().expect("points array");
    assert_eq!(points.len(), 6);
    for point in points {
        assert_eq!(point["deviation"], "0");
        assert_eq!(point["pass"], serde_json::Value::Bool(true));
    }
    let _ = std::fs::remove_file(config);
}

#[test]
fn scan_emits_expected_csv_schema() {
    let out = run(&["scan-invertibility", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).expect("utf-8");
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("draw,multiset,case,k,invertible,spectral_radius")
    );
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6, "bad row: {line}");
        assert_eq!(fields[4], "true");
        let radius: f64 = fields[5].parse().expect("radius parses");
        assert!(radius < 1.0);
    }
}

#[test]
fn float_scan_draws_stay_contractive() {
    let config = write_config("scan44", r#"{"species": 4, "mu": ["1/2","1/2","1/2","1/2"], "n": 4, "mode": "float"}"#);
    let out = run(&[
        "scan-invertibility",
        "--config",
        config.to_str().unwrap(),
        "--draws",
        "3",
        "--seed",
        "17",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).expect("utf-8");
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(!rows.is_empty());
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[4], "true");
        assert!(fields[5].parse::<f64>().unwrap() < 1.0);
    }
    let _ = std::fs::remove_file(config);
}

#[test]
fn rates_brackets_and_matches_formula() {
    let config = write_config("rates", r#"{"species": 1, "mu": ["1/2"], "n": 3}"#);
    let out = run(&[
        "rates",
        "--config",
        config.to_str().unwrap(),
        "--trials",
        "40000",
        "--seed",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).expect("utf-8");
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,species,formula_rate,oracle_rate,mc_estimate,ci_low,ci_high")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    // n=3, mu=1/2 row pins the closed rate 1/3
    let fields: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(fields[2], "1/3");
    assert_eq!(fields[3], "1/3");
    let _ = std::fs::remove_file(config);
}

#[test]
fn simulate_writes_trajectory_and_summary() {
    let csv_path = std::env::temp_dir().join(format!("longswap-traj-{}.csv", std::process::id()));
    let out = run(&[
        "simulate",
        "--seed",
        "7",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).expect("summary JSON");
    assert_eq!(summary["command"], "simulate");
    let csv = std::fs::read_to_string(&csv_path).expect("trajectory written");
    assert!(csv.starts_with("time,particle,direction,positions,word\n"));
    assert_eq!(
        summary["events"].as_u64().unwrap() as usize,
        csv.lines().count() - 1
    );
    let _ = std::fs::remove_file(csv_path);
}

#[test]
fn master_compare_small_system() {
    let config = write_config(
        "master",
        r#"{"species": 2, "mu": ["3/10", "7/10"], "p": "7/10", "n": 2,
            "window": [-7, 8], "t_max": 0.5, "initial_word": "12"}"#,
    );
    let dist_path = std::env::temp_dir().join(format!("longswap-dist-{}.csv", std::process::id()));
    let out = run(&[
        "master-compare",
        "--config",
        config.to_str().unwrap(),
        "--trials",
        "60000",
        "--tolerance",
        "0.02",
        "--seed",
        "3",
        "--dist-out",
        dist_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    assert_eq!(report["generators_equal"], serde_json::Value::Bool(true));
    assert_eq!(
        report["elimination_orders_equal"],
        serde_json::Value::Bool(true)
    );
    assert!(report["tv_distance"].as_f64().unwrap() < 0.02);
    let snapshot = std::fs::read_to_string(&dist_path).expect("distribution written");
    assert!(snapshot.starts_with("state,positions,word,mass\n"));
    let total: f64 = snapshot
        .lines()
        .skip(1)
        .map(|line| line.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-6);
    let _ = std::fs::remove_file(config);
    let _ = std::fs::remove_file(dist_path);
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["verify-ybe", "--points", "4", "--seed", "77"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    let scan_args = ["scan-invertibility", "--seed", "13"];
    let first = run(&scan_args);
    let second = run(&scan_args);
    assert_eq!(first.stdout, second.stdout);
}
