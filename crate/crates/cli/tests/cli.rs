use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magnon-entangle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

/// Data rows of a CSV artifact as `(header, rows)`, skipping `#` metadata.
fn csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn metadata_scalar(path: &Path, name: &str) -> f64 {
    let text = std::fs::read_to_string(path).unwrap();
    let prefix = format!("# scalar {name}: ");
    let line = text.lines().find(|l| l.starts_with(&prefix)).unwrap();
    line[prefix.len()..]
        .split(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn protocol_curve_minimum_row() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("curve.csv");
    let o = bin(&[
        "protocol-curve",
        "--f-threshold",
        "0.95",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv(&out);
    assert_eq!(header, ["zeta", "t_p", "converged"]);
    assert_eq!(rows.len(), 40);
    let best = rows
        .iter()
        .filter(|r| r[2] == "true")
        .map(|r| (r[0].parse::<f64>().unwrap(), r[1].parse::<f64>().unwrap()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!(
        (best.0 - 0.27).abs() <= 0.15 * 0.27,
        "zeta at minimum {}",
        best.0
    );
    let t_opt = metadata_scalar(&out, "t_p_opt");
    assert!(
        best.1 >= t_opt && best.1 <= 1.01 * t_opt,
        "grid minimum {} vs optimum {t_opt}",
        best.1
    );
    assert_eq!(metadata_scalar(&out, "grid_t_p_min"), best.1);
}

#[test]
fn non_converged_cells_are_empty() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("curve.csv");
    let o = bin(&[
        "protocol-curve",
        "--set",
        "zeta_min=0.2",
        "--set",
        "zeta_max=0.5",
        "--set",
        "points=5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = csv(&out);
    let last = rows.last().unwrap();
    assert_eq!(last[1], "");
    assert_eq!(last[2], "false");
    assert_eq!(rows[0][2], "true");
}

#[test]
fn nv_yig_table_one_scalars() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("nv.json");
    let o = bin(&["nv-yig", "--table-1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let s = |k: &str| v["scalars"][k].as_f64().unwrap();
    assert!((s("j_q") - 190.0).abs() <= 0.2 * 190.0, "j_q {}", s("j_q"));
    assert!((s("min_distance") - 1.3e-6).abs() <= 0.1 * 1.3e-6);
    assert!(
        (s("t_phi_required") - 1.5).abs() <= 0.15 * 1.5,
        "T_phi {}",
        s("t_phi_required")
    );
    assert_eq!(s("l_m"), s("v_group") * 1e-6);
    assert_eq!(v["scalar_units"]["j_q"], "1/s");
    assert_eq!(v["parameters"]["d"]["value"], "0.0000002");
    assert_eq!(v["parameters"]["d"]["unit"], "m");
    let cols = v["columns"].as_array().unwrap().len();
    assert!(v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r.as_array().unwrap().len() == cols));
}

#[test]
fn empty_config_echoes_table_one_defaults() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "empty.cfg", "");
    let out = dir.path().join("nv.csv");
    let o = bin(&[
        "nv-yig",
        "--config",
        &cfg,
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    for line in [
        "# param d: 0.0000002 [m]",
        "# param m_s: 139000 [A/m]",
        "# param mu0_h0: 0.01 [T]",
        "# param tau_m: 0.000001 [s]",
        "# param l_y: 0.00001 [m]",
    ] {
        assert!(text.contains(line), "missing `{line}`");
    }
}

#[test]
fn config_file_values_are_used() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "s.cfg", "# grid\nr_min: 1\nr_max: 2\npoints: 3\n");
    let out = dir.path().join("s.csv");
    let o = bin(&["spectrum", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = csv(&out);
    let r: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(r, [1.0, 1.5, 2.0]);
}

#[test]
fn out_of_range_threshold_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.cfg", "f_threshold: 1.2\n");
    let o = bin(&["protocol-curve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("f_threshold") && err.contains(":1:"), "{err}");
}

#[test]
fn duplicate_key_reports_both_lines() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "dup.cfg", "points: 3\n\nr_min: 1\npoints: 4\n");
    let o = bin(&["spectrum", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lines 1 and 4"), "{}", stderr(&o));
}

#[test]
fn unknown_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "u.cfg", "zeta: 0.3\n");
    let o = bin(&["spectrum", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown key `zeta`"));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let o = bin(&["spectrum", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_prints_usage() {
    let o = bin(&["figure-2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));
}

#[test]
fn numerical_failure_exits_three() {
    // Zeeman splitting beyond the zero-field splitting.
    let o = bin(&["nv-yig", "--set", "mu0_h0=0.2"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn validate_reports_every_suite() {
    let o = bin(&["validate", "--set", "cases=5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let err = stderr(&o);
    for suite in [
        "quantum_core",
        "cascade_dynamics",
        "entangle_protocol",
        "magnonics_de",
    ] {
        assert!(err.contains(suite), "missing {suite}");
    }
    assert!(err.contains("5/5"));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("# scalar failed: 0.0000000000000000e0 [count]"));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let o = bin(&[
            "directional",
            "--set",
            "jl_points=3",
            "--set",
            "phase_points=3",
            "--threads",
            threads,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn json_format_round_trips() {
    let o = bin(&["dynamics", "--set", "points=5", "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["experiment"], "dynamics");
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert_eq!(v["units"]["t"], "1/J_q");
}

#[test]
fn csv_numbers_carry_seventeen_digits() {
    let o = bin(&["spectrum", "--set", "points=2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let row = text.lines().next_back().unwrap();
    let first = row.split(',').next().unwrap();
    assert_eq!(first, "8.0000000000000000e0");
}
