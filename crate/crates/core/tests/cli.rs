use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const GOLDEN_ESTIMATE: &str = "tests/golden/estimate_dim8_trials5_seed42.json";

fn pcsft(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pcsft")).args(args).output().expect("spawn pcsft");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, PathBuf) {
    let path = dir.join(name);
    let mut argv = args.to_vec();
    let p = path.to_str().unwrap().to_owned();
    argv.extend_from_slice(&["--out", &p]);
    let (code, stderr) = pcsft(&argv);
    assert!(code != 2 || !path.exists(), "{stderr}");
    (code, path)
}

fn load(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn without_wall_time(text: &str) -> String {
    text.lines().filter(|l| !l.contains("\"wall_time_seconds\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn identity_dim2_single_trial() {
    let dir = tempfile::tempdir().unwrap();
    let (code, path) = run_to(dir.path(), "id.json", &["identity", "--dim", "2", "--trials", "1", "--seed", "7"]);
    assert_eq!(code, 0);
    let v = load(&path);
    assert_eq!(v["schema_version"], "pcsft-report/1");
    let checks = v["trials"][0]["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in checks {
        assert!(c["residual"].as_f64().unwrap() <= 1e-10, "{c}");
    }
    assert_eq!(v["aggregate"]["passed_count"], 4);
    assert_eq!(v["aggregate"]["failed_count"], 0);
}

#[test]
fn identity_scalar_case() {
    let dir = tempfile::tempdir().unwrap();
    let (code, path) = run_to(dir.path(), "id1.json", &["identity", "--dim", "1", "--trials", "1", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(load(&path)["aggregate"]["failed_count"], 0);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, path) = run_to(dir.path(), "a.json", &["identity", "--dim", "2", "--trials", "0", "--seed", "1"]);
    assert_eq!(code, 2);
    assert!(!path.exists());
    let (code, _) =
        run_to(dir.path(), "b.json", &["estimate", "--dim", "2", "--trials", "1", "--samples", "1", "--seed", "1"]);
    assert_eq!(code, 2);
    let (code, _) = pcsft(&["identity", "--dim", "2", "--trials", "1"]);
    assert_eq!(code, 2);
    let (code, _) = pcsft(&["bogus-kind", "--dim", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("r.json");
    let (code, stderr) =
        pcsft(&["identity", "--dim", "2", "--trials", "1", "--seed", "1", "--out", target.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("cannot write report"), "{stderr}");
}

#[test]
fn failed_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, path) = run_to(
        dir.path(),
        "tight.json",
        &["estimate", "--dim", "2", "--trials", "1", "--samples", "200", "--seed", "1", "--z-threshold", "1e-12"],
    );
    assert_eq!(code, 1);
    assert!(load(&path)["aggregate"]["failed_count"].as_u64().unwrap() > 0);
}

#[test]
fn robertson_audit_dim2() {
    let dir = tempfile::tempdir().unwrap();
    let (code, path) =
        run_to(dir.path(), "r2.json", &["robertson-audit", "--dim", "2", "--trials", "1000", "--seed", "1"]);
    assert_eq!(code, 0);
    let v = load(&path);
    assert_eq!(v["aggregate"]["passed_count"], 1000);
    assert!(v["aggregate"]["min_margin"].as_f64().unwrap() >= -1e-9);
    let first = &v["trials"][0];
    assert_eq!(first["label"], "pauli_xy_e0");
    assert!(first["audit"]["margin"].as_f64().unwrap().abs() <= 1e-12);
    assert!((first["audit"]["lhs"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn robertson_audit_dim4() {
    let dir = tempfile::tempdir().unwrap();
    let (code, path) =
        run_to(dir.path(), "r4.json", &["robertson-audit", "--dim", "4", "--trials", "1000", "--seed", "2"]);
    assert_eq!(code, 0);
    let v = load(&path);
    assert_eq!(v["aggregate"]["failed_count"], 0);
    assert_eq!(v["trials"][0]["label"], "random");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"kind": "identity", "dim": 16, "trials": 2, "seed": 9}"#).unwrap();
    let (code, path) = run_to(dir.path(), "c.json", &["--config", cfg.to_str().unwrap(), "--dim", "3"]);
    assert_eq!(code, 0);
    let v = load(&path);
    assert_eq!(v["config"]["dim"], 3);
    assert_eq!(v["config"]["trials"], 2);
}

#[test]
fn estimate_matches_golden_report() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["estimate", "--dim", "8", "--trials", "5", "--samples", "100000", "--seed", "42", "--z-threshold", "4"];
    let (code, path) = run_to(dir.path(), "est.json", &args);
    assert_eq!(code, 0);
    let produced = std::fs::read_to_string(&path).unwrap();

    let mut with_workers = args.to_vec();
    with_workers.extend_from_slice(&["--workers", "8"]);
    let (code, path8) = run_to(dir.path(), "est8.json", &with_workers);
    assert_eq!(code, 0);
    assert_eq!(without_wall_time(&produced), without_wall_time(&std::fs::read_to_string(&path8).unwrap()));

    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join(GOLDEN_ESTIMATE);
    if std::env::var_os("PCSFT_BLESS").is_some() {
        std::fs::create_dir_all(golden.parent().unwrap()).unwrap();
        std::fs::write(&golden, &produced).unwrap();
    }
    let expected = std::fs::read_to_string(&golden).expect("golden report missing; rerun with PCSFT_BLESS=1");
    assert_eq!(without_wall_time(&produced), without_wall_time(&expected));

    let v = load(&path);
    assert_eq!(v["checks_per_trial"], 5);
    assert_eq!(v["aggregate"]["passed_count"], 25);
    assert!(v["aggregate"]["max_abs_z"].as_f64().unwrap() <= 4.0);
}
