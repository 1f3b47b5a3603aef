use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sharpcert(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sharpcert"))
        .args(args)
        .arg("--output")
        .arg(out)
        .env_remove("SHARPCERT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn wave_audit_d3_reports_rho_and_discrepancy() {
    let dir = tempfile::tempdir().unwrap();
    let o = sharpcert(&["wave-audit", "--d", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("wave_audit.json"));
    assert_eq!(v["schema"], 1);
    let a = &v["audits"][0];
    assert!((a["rho"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    let disc = &a["discrepancy"];
    assert_eq!(disc["c_sharp_h1"].as_f64().unwrap(), 6.0);
    assert_eq!(disc["c_h_one"].as_f64().unwrap(), 4.5);
}

#[test]
fn wave_audit_d5_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let o = sharpcert(&["wave-audit", "--d", "5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sphere_verify_range_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = sharpcert(&["sphere-verify", "--d-min", "3", "--d-max", "60"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = read_json(&dir.path().join("sphere_verify.json"));
    let d3 = &v["certificates"][0];
    assert_eq!(d3["d"], 3);
    assert_eq!(d3["k_numeric"], 7);
    assert_eq!(d3["verdict"], "PASS");
    assert_eq!(v["certificates"].as_array().unwrap().len(), 58);
}

#[test]
fn sphere_tables_match_reference_c0() {
    let dir = tempfile::tempdir().unwrap();
    let o = sharpcert(&["sphere-tables", "--format", "csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let ours = std::fs::read_to_string(dir.path().join("sphere_table1.csv")).unwrap();
    let reference = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/reference_table1.csv"),
    )
    .unwrap();
    let col = |s: &str| -> Vec<f64> { s.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect() };
    let (a, b) = (col(&ours), col(&reference));
    assert_eq!(a.len(), 59);
    assert_eq!(a.len(), b.len());
    for (x, v) in a.iter().zip(&b) {
        assert!(*x >= *v - 1e-12 && *x <= v + 2e-5 + 1e-12, "{x} vs {v}");
    }
    assert!(ours.starts_with("d,pm1_bk_threshold,k_threshold,c0_tilde\n"));
}

#[test]
fn outputs_are_identical_across_parallelism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["schrod-verify", "--d-min", "1", "--d-max", "6", "--m-max", "60"];
    let oa = sharpcert(&[&args[..], &["--parallelism", "1"]].concat(), a.path());
    let ob = sharpcert(&[&args[..], &["--parallelism", "4"]].concat(), b.path());
    assert_eq!(oa.status.code(), Some(0));
    assert_eq!(oa.stdout, ob.stdout);
    let fa = std::fs::read(a.path().join("schrod_verify.json")).unwrap();
    let fb = std::fs::read(b.path().join("schrod_verify.json")).unwrap();
    assert_eq!(fa, fb);
    let v: Value = serde_json::from_slice(&fa).unwrap();
    let first = &v["reports"][0];
    for key in ["d", "m_max", "min_gap", "verdict", "per_m"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert!(first["per_m"][0].get("method_spread").is_some());
}

#[test]
fn penrose_and_deficit_pass() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sharpcert(&["penrose-check"], dir.path()).status.code(), Some(0));
    assert_eq!(sharpcert(&["deficit-demo"], dir.path()).status.code(), Some(0));
    assert!(dir.path().join("penrose_check.json").exists());
    assert!(dir.path().join("deficit_demo.json").exists());
}

#[test]
fn env_sets_default_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sharpcert"))
        .args(["penrose-check"])
        .env("SHARPCERT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("penrose_check.json").exists());
}

#[test]
fn io_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = sharpcert(&["penrose-check"], &blocker.join("sub"));
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn bad_ranges_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = sharpcert(&["sphere-verify", "--d-min", "9", "--d-max", "3"], dir.path());
    assert_eq!(o.status.code(), Some(64));
    let o = sharpcert(&["sphere-verify", "--d", "3", "--tol=-1"], dir.path());
    assert_eq!(o.status.code(), Some(64));
    let o = sharpcert(&["sphere-verify", "--format", "xml"], dir.path());
    assert_eq!(o.status.code(), Some(64));
}
