use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn biharm(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biharm"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("BIHARM_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn schema() -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_biharm")).arg("report-schema").output().unwrap();
    assert!(out.status.success());
    serde_json::from_slice(&out.stdout).unwrap()
}

fn validate(schema: &Value, instance: &Value) {
    let compiled = jsonschema::JSONSchema::compile(schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(instance) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| e.to_string()).collect(),
    };
    assert!(msgs.is_empty(), "report does not validate: {msgs:?}");
}

#[test]
fn dispersive_run_passes_with_expected_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = biharm(&["dispersive", "--n", "5"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    let slope = r["metrics"]["fitted_slope"].as_f64().unwrap();
    assert!((slope + 1.25).abs() <= 0.05);
    assert!(dir.path().join("sup_norm.csv").exists());
    assert!(dir.path().join("summary.txt").exists());
    assert_eq!(r["module_versions"]["propagator"], "1.0.0");
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn excluded_endpoint_fails_with_reason() {
    let dir = tempfile::tempdir().unwrap();
    let out = biharm(&["admissible", "--q", "2", "--r", "inf"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = report(dir.path());
    assert_eq!(r["checks"][0]["pass"], false);
    assert_eq!(r["checks"][0]["reason"], "excluded endpoint");
}

#[test]
fn admissible_pair_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = biharm(&["admissible", "--q", "inf", "--r", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn negative_dt_leaves_no_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("run");
    let out = biharm(&["evolve", "--dt", "-1e-3"], &target);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    assert!(!target.exists());
}

#[test]
fn unknown_config_fields_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"params": {"n": 5}, "dtt": 0.1}"#).unwrap();
    let out = biharm(&["evolve", "--config", cfg.to_str().unwrap()], &dir.path().join("run"));
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("run").exists());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"params": {"n": 7, "p": 3.5}, "T": 0.1, "dt": 0.01}"#).unwrap();
    let run = dir.path().join("run");
    let out = biharm(&["evolve", "--config", cfg.to_str().unwrap(), "--n", "5", "--rmax", "20", "--m", "64"], &run);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let resolved: Value = serde_json::from_str(&std::fs::read_to_string(run.join("config.json")).unwrap()).unwrap();
    assert_eq!(resolved["params"]["n"], 5);
    assert_eq!(resolved["params"]["p"], 3.5);
    assert!(run.join("trajectory/manifest.json").exists());
}

#[test]
fn mismatched_experiment_in_config_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"experiment": "fundsol"}"#).unwrap();
    let out = biharm(&["evolve", "--config", cfg.to_str().unwrap()], &dir.path().join("run"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn environment_sets_default_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_biharm"))
        .arg("exponents")
        .env("BIHARM_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn identical_configs_give_identical_artifacts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["evolve", "--T", "0.05", "--dt", "0.01", "--rmax", "20", "--m", "64", "--set", "checkpoint_every=1"];
    assert!(biharm(&args, a.path()).status.success());
    assert!(biharm(&args, b.path()).status.success());
    for f in ["mass.csv", "report.json", "trajectory/state_00003.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn reports_validate_against_emitted_schema() {
    let s = schema();
    assert_eq!(s["version"], "1.0.0");
    let runs: [&[&str]; 4] = [
        &["admissible", "--q", "2", "--r", "inf"],
        &["exponents"],
        &["concentrate"],
        &["decompose", "--T", "0.2", "--dt", "0.01", "--rmax", "20", "--m", "64", "--set", "linear_only=true"],
    ];
    for args in runs {
        let dir = tempfile::tempdir().unwrap();
        let out = biharm(args, dir.path());
        assert!(out.status.code().unwrap() <= 1, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        validate(&s, &report(dir.path()));
    }
}

#[test]
fn schema_rejects_malformed_report() {
    let s = schema();
    let compiled = jsonschema::JSONSchema::compile(&s).unwrap();
    assert!(!compiled.is_valid(&serde_json::json!({"experiment": 3})));
}

#[test]
fn ground_state_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out = biharm(&["ground-state"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("ground_state.csv").exists());
    assert!(dir.path().join("profile.csv").exists());
    let r = report(dir.path());
    assert!(r["metrics"]["residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn defocusing_soliton_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = biharm(&["evolve", "--sign", "defocusing", "--set", "data=soliton"], &dir.path().join("run"));
    assert_eq!(out.status.code(), Some(2));
}
