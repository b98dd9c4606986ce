use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const PARAMS: [&str; 8] = ["--gamma", "1.5", "--s", "1", "--A", "1", "--B", "1.1"];

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhd-shockkit"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn run_ok(args: &[&str], out: &Path) -> String {
    let o = run(args, out);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn with_params<'a>(cmd: &[&'a str]) -> Vec<&'a str> {
    cmd.iter().copied().chain(PARAMS).collect()
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

fn assert_valid(name: &str, dir: &Path) {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_dir().join(format!("{name}.schema.json"))).unwrap()).unwrap();
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{name}.json: {errors:#?}");
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn states_and_profile_outputs_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_ok(&with_params(&["states"]), dir.path());
    assert!(summary.contains("Lax2"));
    assert_valid("states", dir.path());
    run_ok(&with_params(&["profile"]), dir.path());
    assert_valid("profile", dir.path());
    assert_eq!(header(&dir.path().join("profile.csv")), "y,P,Q,J");
}

#[test]
fn essential_outputs_match_schema() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_ok(&with_params(&["essential"]), dir.path());
    assert_eq!(summary.lines().count(), 2);
    assert_valid("essential", dir.path());
    for f in ["essential_minus.csv", "essential_plus.csv"] {
        assert_eq!(header(&dir.path().join(f)), "xi,re_lambda1,im_lambda1,re_lambda2,im_lambda2");
    }
    let other = tempfile::tempdir().unwrap();
    let args = [
        "essential", "--gamma", "1.5", "--mu", "0.1", "--k", "0.5", "--s", "1", "--A", "1", "--B", "1.3", "--rho", "0.519", "--j",
        "-0.418", "--xi-steps", "101",
    ];
    let summary = run_ok(&args, other.path());
    assert!(summary.starts_with("state: stable"), "{summary}");
    assert_valid("essential", other.path());
    let rows = std::fs::read_to_string(other.path().join("essential_state.csv")).unwrap();
    assert_eq!(rows.lines().count(), 102);
}

#[test]
fn bounds_and_evans_outputs_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&with_params(&["bounds"]), dir.path());
    assert_valid("bounds", dir.path());
    let summary = run_ok(&with_params(&["evans", "--radius", "10", "--with-bounds"]), dir.path());
    assert!(summary.starts_with("winding number 0"), "{summary}");
    assert_valid("evans", dir.path());
    assert_eq!(header(&dir.path().join("evans.csv")), "re_lambda,im_lambda,re_E,im_E,log_scale");
    let fixture = tempfile::tempdir().unwrap();
    run_ok(&with_params(&["evans", "--radius", "10", "--constant-fixture"]), fixture.path());
    assert_valid("evans", fixture.path());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(fixture.path().join("evans.json")).unwrap()).unwrap();
    assert_eq!(doc["constant_fixture"], Value::Bool(true));
    assert_eq!(doc["bounds"], Value::Null);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.toml");
    std::fs::write(&cfg, "[params]\ngamma = 1.5\ns = 1.0\nA = 1.0\nB = 1.1\nmu = 0.5\n").unwrap();
    run_ok(&["states", "--config", cfg.to_str().unwrap(), "--mu", "0.75"], dir.path());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("states.json")).unwrap()).unwrap();
    assert_eq!(doc["params"]["mu"], Value::from(0.75));
    assert_eq!(doc["params"]["B"], Value::from(1.1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| run(args, dir.path()).status.code().unwrap();
    assert_eq!(code(&["states", "--gamma", "1.5", "--s", "1"]), 1);
    assert_eq!(code(&["states", "--gamma", "1.5", "--s", "1", "--A", "1", "--B", "-5"]), 2);
    assert_eq!(code(&with_params(&["evans", "--radius", "1e-4"])), 1);
    assert_eq!(code(&["states", "--config", "/nonexistent/scenario.toml"]), 1);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[params]\ngamma = 1.5\nbogus = 2\n").unwrap();
    assert_eq!(code(&["states", "--config", bad.to_str().unwrap()]), 1);
    let coarse = dir.path().join("coarse.toml");
    std::fs::write(&coarse, "[evans]\nsamples_per_piece = 2\n").unwrap();
    let args = with_params(&["evans", "--config", coarse.to_str().unwrap(), "--radius", "10", "--constant-fixture", "--max-refine", "0"]);
    assert_eq!(code(&args), 4);
}

#[test]
fn failed_runs_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&["states", "--gamma", "1.5", "--s", "1", "--A", "1", "--B", "-5"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(!o.stderr.is_empty());
}
