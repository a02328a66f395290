use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn statfem(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_statfem"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_CONFIG: &str = r#"{
  "kernels": [{"nu": 1.5, "lengthscale": 1.0, "variance": 100.0}],
  "n_fe": [32],
  "n": [3, 7, 15, 31, 63],
  "noise_sd": 0.001,
  "realizations": 3,
  "seed": 11
}"#;

#[test]
fn demo_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = statfem(&["demo"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["rates.csv", "baseline.csv", "manifest.json", "posterior.csv", "observations.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let rates = fs::read_to_string(dir.path().join("rates.csv")).unwrap();
    assert!(rates.lines().count() >= 6);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "demo");
    assert_eq!(manifest["seed"], manifest["config"]["seed"]);
    let obs = fs::read_to_string(dir.path().join("observations.csv")).unwrap();
    assert_eq!(obs.lines().count(), 8);
}

#[test]
fn run_is_deterministic_and_honours_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, SMALL_CONFIG).unwrap();
    let cfg = cfg.to_str().unwrap();
    let read = |sub: &str| fs::read(dir.path().join(sub).join("rates.csv")).unwrap();

    assert!(statfem(&["run", "--config", cfg], &dir.path().join("a")).status.success());
    assert!(statfem(&["run", "--config", cfg, "--threads", "2"], &dir.path().join("b")).status.success());
    assert!(statfem(&["run", "--config", cfg, "--seed", "12"], &dir.path().join("c")).status.success());
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
    assert!(!dir.path().join("a").join("baseline.csv").exists());

    let o = statfem(&["baseline-compare", "--config", cfg, "--mode", "exact"], &dir.path().join("d"));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("d").join("baseline.csv").exists());
    let manifest = fs::read_to_string(dir.path().join("d").join("manifest.json")).unwrap();
    assert!(manifest.contains("\"mode\": \"exact\""));
}

#[test]
fn missing_config_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = statfem(&["run", "--config", "/definitely/not/here.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/definitely/not/here.json"));

    let o = statfem(&["run"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, SMALL_CONFIG.replace("\"noise_sd\": 0.001", "\"noise_sd\": -1")).unwrap();
    let o = statfem(&["run", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("noise_sd"), "{}", stderr(&o));

    fs::write(&cfg, SMALL_CONFIG.replace("\"seed\"", "\"sede\"")).unwrap();
    let o = statfem(&["run", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sede"), "{}", stderr(&o));

    fs::write(&cfg, SMALL_CONFIG.replace("1.5", "1.0")).unwrap();
    let o = statfem(&["run", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kernels[0]"), "{}", stderr(&o));
}

#[test]
fn verify_passes_and_detects_lumped_fault() {
    let dir = tempfile::tempdir().unwrap();
    let o = statfem(&["verify"], &dir.path().join("ok"));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let report = fs::read_to_string(dir.path().join("ok").join("verify-report.txt")).unwrap();
    for suite in ["fe-convergence", "oracle-equivalence", "psd", "boundary-zero", "prop6"] {
        assert!(report.contains(&format!("PASS {suite}")), "{report}");
    }
    assert!(report.contains("slope="));

    let o = statfem(&["verify", "--mode", "lumped"], &dir.path().join("fault"));
    assert_eq!(o.status.code(), Some(1));
    let report = fs::read_to_string(dir.path().join("fault").join("verify-report.txt")).unwrap();
    assert!(report.contains("FAIL oracle-equivalence"), "{report}");
    assert!(stderr(&o).contains("oracle-equivalence"));
}

#[test]
fn prop6_subcommand_reports_trials() {
    let dir = tempfile::tempdir().unwrap();
    let o = statfem(&["prop6", "--seed", "5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("prop6.csv")).unwrap();
    assert_eq!(csv.lines().count(), 101);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn bad_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(statfem(&["demo", "--mode", "diagonal"], dir.path()).status.code(), Some(2));
    assert_eq!(statfem(&["demo", "--threads", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(statfem(&["demo", "--seed", "-3"], dir.path()).status.code(), Some(2));
}
