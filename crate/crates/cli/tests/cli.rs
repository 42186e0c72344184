use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn choigram(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choigram")).args(args).env_remove("CHOIGRAM_THREADS").output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn export(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut args = vec!["export-channel", "--output", path_str(&path)];
    args.extend_from_slice(extra);
    let out = choigram(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn write_config(dir: &TempDir, body: &str) -> PathBuf {
    let path = dir.path().join("run.toml");
    std::fs::write(&path, body).unwrap();
    path
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let identity = export(&dir, "id.json", &["--kind", "identity"]);
    let transpose = export(&dir, "t.json", &["--kind", "transpose"]);

    let ok = choigram(&["check", path_str(&identity), "--format", "json"]);
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["cp_verdict"], true);
    assert!((report["choi_min"].as_f64().unwrap()).abs() < 1e-12);
    assert!((report["trace_choi"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((report["trace_normalized_choi"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let not_cp = choigram(&["check", path_str(&transpose), "--format", "json"]);
    assert_eq!(not_cp.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&not_cp.stdout).unwrap();
    assert_eq!(report["cp_verdict"], false);
    assert_eq!(report["choi_gram_agree"], true);
    assert!((report["choi_min"].as_f64().unwrap() + 0.5).abs() < 1e-12);

    let text = std::fs::read_to_string(&identity).unwrap();
    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    let bad = choigram(&["check", path_str(&truncated)]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error:"));

    let missing = choigram(&["check", path_str(&dir.path().join("absent.json"))]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn usage_errors_do_not_look_like_non_cp() {
    assert_eq!(choigram(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(choigram(&["check"]).status.code(), Some(1));
    assert_eq!(choigram(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_csv_has_header_and_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let depol = export(&dir, "dep.json", &["--kind", "depolarizing", "--dim", "3"]);
    let out = choigram(&["check", path_str(&depol), "--basis", "weyl"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("dim,basis,tol,choi_min,gram_min,cp_verdict"));
    assert!(lines[1].starts_with("3,weyl,"));
}

#[test]
fn pauli_basis_rejects_qutrits() {
    let dir = tempfile::tempdir().unwrap();
    let depol = export(&dir, "dep.json", &["--kind", "depolarizing", "--dim", "3"]);
    let out = choigram(&["check", path_str(&depol), "--basis", "pauli"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn markovian_scan_has_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(&dir, "a = 0.0\nn_points = 31\n");
    let csv = dir.path().join("scan.csv");
    let out = choigram(&["scan", "--config", path_str(&config), "--output", path_str(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, ["t", "s", "r", "choi_min", "gram_min", "flag"]);
    assert_eq!(rows.len(), 31 * 32 / 2);
    assert!(rows.iter().all(|r| r[5] == "ok"));
    assert!(column(&header, &rows, "r").iter().all(|&r| r <= 1.0 + 1e-12));
}

#[test]
fn two_point_scan_has_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(&dir, "n_points = 2\n");
    let out = choigram(&["scan", "--config", path_str(&config)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn default_scan_flags_exactly_the_ratios_above_one() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let out = choigram(&["scan", "--output", path_str(&csv)]);
    assert!(out.status.success());
    let (header, rows) = read_csv(&csv);
    let r = column(&header, &rows, "r");
    let gram = column(&header, &rows, "gram_min");
    let flagged: Vec<bool> = rows.iter().map(|row| row[5] == "non_cp").collect();
    assert!(flagged.iter().any(|&f| f));
    for k in 0..rows.len() {
        assert_eq!(flagged[k], r[k] > 1.0 + 1e-10, "row {k}: r = {}", r[k]);
        // damping Gram minimum is min(0, 1 − r) up to rounding
        assert!((gram[k] - (1.0 - r[k]).min(0.0)).abs() < 1e-9, "row {k}");
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("violating"));
}

#[test]
fn scan_json_and_dephasing_model() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"model": "pure_dephasing", "n_points": 21}"#).unwrap();
    let out = choigram(&["scan", "--config", path_str(&config), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["model"], "pure_dephasing");
    assert!(doc["violating_pairs"].as_u64().unwrap() > 0);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(&dir, "gamma_zero = 0.2\n");
    assert_eq!(choigram(&["scan", "--config", path_str(&config)]).status.code(), Some(1));
    let config = write_config(&dir, "n_points = 1\n");
    assert_eq!(choigram(&["scan", "--config", path_str(&config)]).status.code(), Some(1));
}

#[test]
fn figures_are_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let figs = dir.path().join("figs");
    let out = choigram(&["figures", "--output", path_str(&figs)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in [
        "gamma.csv",
        "ratio_slices.csv",
        "min_eigenvalues.csv",
        "trace_distance.csv",
        "coherence.csv",
        "trajectory.csv",
        "backflow.csv",
    ] {
        assert!(figs.join(name).exists(), "{name}");
    }

    let (h, rows) = read_csv(&figs.join("gamma.csv"));
    let t = column(&h, &rows, "t");
    let g = column(&h, &rows, "gamma");
    assert!((g[0] - 1.7).abs() < 1e-12);
    assert_eq!(t.len(), 121);

    let (h, rows) = read_csv(&figs.join("trace_distance.csv"));
    let d = column(&h, &rows, "trace_distance");
    let eta = column(&h, &rows, "decay_factor");
    assert!((d[0] - 1.0).abs() < 1e-12);
    for (x, y) in d.iter().zip(&eta) {
        assert!((x - y).abs() < 1e-6);
    }

    // lag-1 Gram minimum is negative exactly where the rate averaged over the
    // step is negative, i.e. where D increases
    let (h, rows) = read_csv(&figs.join("min_eigenvalues.csv"));
    let gram = column(&h, &rows, "gram_min");
    assert_eq!(gram.len(), 120);
    for k in 0..gram.len() {
        assert_eq!(gram[k] < -1e-10, d[k + 1] > d[k] + 1e-12, "segment {k}");
    }
    let first_negative_gram = gram.iter().position(|&v| v < -1e-10).unwrap();
    let first_negative_rate = g.iter().position(|&v| v < 0.0).unwrap();
    assert!(first_negative_gram.abs_diff(first_negative_rate) <= 1);

    let (h, rows) = read_csv(&figs.join("backflow.csv"));
    assert_eq!(rows.len(), 1);
    assert!(column(&h, &rows, "gain")[0] > 0.0);
}

#[test]
fn charfunc_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let identity = export(&dir, "id.json", &["--kind", "identity"]);
    let out = choigram(&["charfunc", path_str(&identity)]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let labels = doc["labels"].as_array().unwrap();
    let values = doc["values"].as_array().unwrap();
    assert_eq!(labels.len(), 16);
    assert_eq!(labels[0], "II");
    // Ω of the identity is |Ω⟩⟨Ω|/2; χ(σ⊗σ) = ±1/2 on XX, ZZ and −1/2 on YY
    let at = |label: &str| {
        let k = labels.iter().position(|l| l == label).unwrap();
        values[k][0].as_f64().unwrap()
    };
    assert!((at("II") - 0.5).abs() < 1e-12);
    assert!((at("XX") - 0.5).abs() < 1e-12);
    assert!((at("YY") + 0.5).abs() < 1e-12);
    assert!((at("ZZ") - 0.5).abs() < 1e-12);
    assert!(at("XI").abs() < 1e-12);
    assert_eq!(doc["gram"]["entries"].as_array().unwrap().len(), 16);
}

#[test]
fn exported_random_channel_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = export(&dir, "a.json", &["--kind", "random", "--rank", "3", "--seed", "7"]);
    let b = export(&dir, "b.json", &["--kind", "random", "--rank", "3", "--seed", "7"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let out = choigram(&["check", path_str(&a), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));

    let damping = export(&dir, "ad.json", &["--kind", "amplitude-damping", "--param", "1.2"]);
    assert_eq!(choigram(&["check", path_str(&damping)]).status.code(), Some(2));
}
