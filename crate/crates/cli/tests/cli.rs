use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn jgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jgeo"))
        .args(args)
        .env("JGEO_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const HALF: &str = r#"{"algebra": {"blocks": [2]}, "state": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#;
const ABELIAN_HALF: &str = r#"{"blocks": [1, 1], "state": [[[0.5]], [[0.5]]]}"#;
const SIGMA_Z: &str = "[[1, 0], [0, -1]]";
const SIGMA_X: &str = "[[0, 1], [1, 0]]";

fn close(v: &Value, expected: f64, tol: f64) {
    let x = v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"));
    assert!((x - expected).abs() <= tol, "{x} vs {expected}");
}

#[test]
fn metric_at_maximally_mixed_qubit() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", HALF);
    let r = json_of(&jgeo(&["metric", "--state", s.to_str().unwrap(), "--dir-a", SIGMA_Z, "--dir-b", SIGMA_Z]));
    for key in ["g1_fields", "g1_tangent", "bures_helstrom"] {
        close(&r[key], 1.0, 1e-12);
    }
    assert!(r["fisher_rao"].is_null());
    close(&r["relative_differences"]["g1_fields_vs_g1_tangent"], 0.0, 1e-12);

    let halved = json_of(&jgeo(&[
        "metric", "--state", s.to_str().unwrap(), "--dir-a", SIGMA_Z, "--dir-b", SIGMA_Z, "--bh-half",
    ]));
    close(&halved["bures_helstrom"], 0.5, 1e-12);
}

#[test]
fn metric_on_abelian_state_reports_fisher_rao() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", ABELIAN_HALF);
    let d = write(&dir, "d.json", r#"{"blocks": [1, 1], "element": [[[1]], [[-1]]]}"#);
    let d = d.to_str().unwrap();
    let r = json_of(&jgeo(&["metric", "--state", s.to_str().unwrap(), "--dir-a", d, "--dir-b", d]));
    close(&r["fisher_rao"], 1.0, 1e-12);
    close(&r["g1_fields"], 1.0, 1e-12);
}

#[test]
fn invalid_inputs_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"blocks": [2], "state": [[1, 0], [0, 1]]}"#);
    let out = jgeo(&["metric", "--state", bad.to_str().unwrap(), "--dir-a", SIGMA_Z, "--dir-b", SIGMA_Z]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let s = write(&dir, "s.json", HALF);
    let zero = "[[0, 0], [0, 0]]";
    let out = jgeo(&["geodesic", "--state", s.to_str().unwrap(), "--dir-a", zero]);
    assert_eq!(out.status.code(), Some(2));

    let out = jgeo(&["metric", "--state", dir.path().join("missing.json").to_str().unwrap(), "--dir-a", SIGMA_Z, "--dir-b", SIGMA_Z]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn curvature_at_maximally_mixed_qubit() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", HALF);
    let r = json_of(&jgeo(&["curvature", "--state", s.to_str().unwrap(), "--dir-a", SIGMA_Z, "--dir-b", SIGMA_X]));
    close(&r["sectional_o"], 0.75, 1e-12);
    close(&r["sectional_o1"], 1.0, 1e-12);
}

fn csv_rows(out: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn abelian_geodesic_csv() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", ABELIAN_HALF);
    let d = r#"[[1, 0], [0, -1]]"#;
    let t_max = std::f64::consts::FRAC_PI_2.to_string();
    let out = jgeo(&["geodesic", "--state", s.to_str().unwrap(), "--dir-a", d, "--t-max", &t_max, "--samples", "11"]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header[..4], ["t", "trace", "min_eigenvalue", "rank"]);
    // t, trace, min eigenvalue, rank, two eigenvalues, two 1x1 blocks with re/im
    assert_eq!(header.len(), 10);
    assert_eq!(rows.len(), 11);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for r in &rows {
        assert_eq!(r.len(), header.len());
        let t = r[0];
        close(&Value::from(r[col("trace")]), 1.0, 1e-12);
        close(&Value::from(r[col("b0_0_0_re")]), 0.5 + t.sin() / 2.0, 1e-12);
        close(&Value::from(r[col("b1_0_0_re")]), 0.5 - t.sin() / 2.0, 1e-12);
    }
    assert_eq!(rows[0][col("rank")], 2.0);
    assert_eq!(rows[10][col("rank")], 1.0);
}

#[test]
fn zero_length_geodesic_emits_one_row() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", HALF);
    let out = jgeo(&["geodesic", "--state", s.to_str().unwrap(), "--dir-a", SIGMA_X, "--t-max", "0"]);
    let (header, rows) = csv_rows(&out);
    // t, trace, min eigenvalue, rank, 2 eigenvalues, 4 complex entries
    assert_eq!(header.len(), 14);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 0.0);
}

#[test]
fn geodesic_json_and_spec_documents() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "g.json",
        r#"{"blocks": [2], "geodesic": {"start": [[0.5, 0], [0, 0.5]], "direction": [[0, 1], [1, 0]]}}"#,
    );
    let r = json_of(&jgeo(&["geodesic", "--spec", spec.to_str().unwrap(), "--samples", "3", "--format", "json"]));
    close(&r["speed"], 1.0, 1e-12);
    assert_eq!(r["samples"].as_array().unwrap().len(), 3);
}

#[test]
fn gns_dimensions() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.json", HALF);
    let r = json_of(&jgeo(&["gns", "--state", s.to_str().unwrap()]));
    assert_eq!(r["quotient_dim"], 4);
    assert_eq!(r["commutant_dim"], 4);
    let pure = write(&dir, "p.json", r#"{"blocks": [2], "state": [[1, 0], [0, 0]]}"#);
    let r = json_of(&jgeo(&["gns", "--state", pure.to_str().unwrap()]));
    assert_eq!(r["quotient_dim"], 2);
    assert_eq!(r["commutant_dim"], 1);
}

#[test]
fn verify_suites_pass() {
    let r = json_of(&jgeo(&["verify", "--suite", "jordan", "--dim", "3", "--trials", "20"]));
    assert_eq!(r["passed"], true);
    let r = json_of(&jgeo(&["verify", "--suite", "submersion", "--dim", "2", "--trials", "20"]));
    assert_eq!(r["passed"], true);
    let r = json_of(&jgeo(&["verify", "--suite", "abelian-curvature", "--dim", "3", "--trials", "10"]));
    assert_eq!(r["passed"], true);
    let observed = r.to_string();
    assert!(observed.contains("0.25"), "{observed}");
}

#[test]
fn unknown_suite_is_an_input_error() {
    assert_eq!(jgeo(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--suite", "riemann", "--dim", "2", "--seed", "7", "--trials", "10"];
    let a = jgeo(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_jgeo"))
        .args(args)
        .env("JGEO_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
