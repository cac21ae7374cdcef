use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssp-lmm"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn compute_grid_has_one_row_per_cell() {
    let dir = TempDir::new().unwrap();
    let o = run(
        dir.path(),
        &["compute", "--variant", "explicit", "--k", "1..6", "--p", "1..3", "--tol", "1/1073741824", "--format", "csv"],
    );
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 18);
    let first = &rows[0];
    assert_eq!((&first[1], &first[2], &first[4], &first[6]), ("1", "1", "1", "true"));
}

#[test]
fn compute_implicit_equality_case() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["compute", "--variant", "implicit", "--k", "1", "--p", "2"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(line.starts_with("implicit,1,2,ok,2,"), "{line}");
}

#[test]
fn compute_writes_certificates_that_certify() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["compute", "--k", "3", "--p", "2", "--cert-dir", "certs"]);
    assert_eq!(code(&o), 0);
    let path = dir.path().join("certs/dual-explicit-k3-p2.cert");
    assert!(stdout(&o).contains("dual-explicit-k3-p2.cert"));
    let o = run(dir.path(), &["certify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn compute_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = ["compute", "--variant", "implicit", "--k", "1..4", "--p", "2..3", "--format", "json"];
    assert_eq!(run(dir.path(), &args).stdout, run(dir.path(), &args).stdout);
}

#[test]
fn bad_flags_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["compute", "--k", "5..2", "--p", "1"])), 2);
    assert_eq!(code(&run(dir.path(), &["compute", "--k", "1", "--p", "1", "--tol", "0"])), 2);
    assert_eq!(code(&run(dir.path(), &["frobnicate"])), 2);
}

#[test]
fn bounds_prints_value_and_certificate_path() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["bounds", "--variant", "explicit", "--k", "4", "--p", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("2/3"));
    assert!(text.contains("certificate: "));
    assert!(dir.path().join("bound-explicit-k4-p2.cert").exists());
}

#[test]
fn certify_exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["bounds", "--k", "4", "--p", "2"])), 0);
    let original = fs::read_to_string(dir.path().join("bound-explicit-k4-p2.cert")).unwrap();

    assert_eq!(code(&run(dir.path(), &["certify", "bound-explicit-k4-p2.cert"])), 0);

    // Larger r keeps a closed certificate valid.
    fs::write(dir.path().join("up.cert"), original.replace("r: 2/3", "r: 5/3")).unwrap();
    let o = run(dir.path(), &["certify", "up.cert"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    // Nonzero q(0) breaks the closed-system equality.
    fs::write(dir.path().join("bad.cert"), original.replace("coefficients: 0 ", "coefficients: 1/1000 ")).unwrap();
    let o = run(dir.path(), &["certify", "bad.cert"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("INVALID"));

    fs::write(dir.path().join("broken.cert"), original.replace("p: 2", "p: two")).unwrap();
    let o = run(dir.path(), &["certify", "broken.cert"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn certify_json_and_audit() {
    let dir = TempDir::new().unwrap();
    run(dir.path(), &["bounds", "--k", "4", "--p", "3"]);
    let o = run(dir.path(), &["certify", "bound-explicit-k4-p3.cert", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], true);
    let o = run(dir.path(), &["certify", "bound-explicit-k4-p3.cert", "--audit"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("audit: PASS"));
}

#[test]
fn threshold_for_order_four() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["threshold", "--p", "4"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "11"));
}

#[test]
fn impexp_holds_on_small_grid() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["impexp", "--k", "1..3", "--p", "1..2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 1 + 6);
}

#[test]
fn validate_forward_euler_on_decay() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("fe.json"), r#"{"k":1,"explicit":true,"alpha":["1"],"beta":["0","1"]}"#).unwrap();
    let o = run(
        dir.path(),
        &["validate", "--method", "fe.json", "--problem", "decay", "--h", "0.5,1,2", "--csv-dir", "runs"],
    );
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["entries"].as_array().unwrap().len(), 3);
    let csvs = fs::read_dir(dir.path().join("runs")).unwrap().count();
    assert_eq!(csvs, 3);
}

#[test]
fn validate_flags_steps_beyond_threshold() {
    let dir = TempDir::new().unwrap();
    // Second-order two-step method with a negative coefficient: no SSP step size.
    fs::write(
        dir.path().join("ab2.json"),
        r#"{"k":2,"explicit":true,"alpha":["1","0"],"beta":["0","3/2","-1/2"]}"#,
    )
    .unwrap();
    let o = run(dir.path(), &["validate", "--method", "ab2.json", "--problem", "advection:40", "--h", "0.9"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["entries"][0]["within_threshold"], false);
    assert_eq!(code(&o), 0);
}

#[test]
fn support_reports_structure() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["support", "--k", "3", "--p", "2"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["r_lo"], "1/2");
    assert_eq!(v["exact"], true);
    let o = run(dir.path(), &["support", "--k", "2", "--p", "2"]);
    assert_eq!(code(&o), 1);
}
