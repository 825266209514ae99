use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_metapot"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data").join(name)
}

fn run(args: &[&str]) -> (i32, serde_json::Value) {
    let out = bin().args(args).output().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    (out.status.code().unwrap(), json)
}

#[test]
fn verify_suite_exits_zero() {
    let (code, report) = run(&["verify", "variational", "--trials", "50", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(report["reportVersion"], 1);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["tolerance"].is_number()));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "nonsense"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    let f = data("cycle8.json");
    assert_eq!(run(&["cap", "--process", f.to_str().unwrap(), "--a", "0", "--b", "0"]).0, 2);
    assert_eq!(run(&["cap", "--process", "/nonexistent.json", "--a", "0", "--b", "1"]).0, 2);
}

#[test]
fn cap_on_cycle_file() {
    let f = data("cycle8.json");
    let (code, r) = run(&["cap", "--process", f.to_str().unwrap(), "--a", "0", "--b", "4", "--adjoint"]);
    assert_eq!(code, 0);
    let v = r["results"]["escape"]["value"].as_f64().unwrap();
    assert!((v - 1.0 / 32.0).abs() < 1e-14);
}

#[test]
fn failing_check_exits_one() {
    // one replication cannot land within three standard errors of a zero-variance estimate
    let f = data("cycle8.json");
    let (code, r) = run(&["simulate", "--process", f.to_str().unwrap(), "--hit", "4", "--reps", "1", "--seed", "2"]);
    assert_eq!(code, 1, "{r}");
}

#[test]
fn reports_repeat_modulo_timings() {
    let f = data("cycle8.json");
    let args = ["simulate", "--process", f.to_str().unwrap(), "--hit", "4", "--reps", "2000", "--seed", "3"];
    let (_, mut a) = run(&args);
    let (_, mut b) = run(&args);
    a["timings"] = serde_json::Value::Null;
    b["timings"] = serde_json::Value::Null;
    assert_eq!(a, b);
}

#[test]
fn config_file_drives_zrp() {
    let (code, r) = run(&["zrp", "--config", data("zrp.toml").to_str().unwrap(), "--n-grid", "8,10", "--mode", "rates"]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["parameters"]["nGrid"], serde_json::json!([8, 10]));
    assert_eq!(r["parameters"]["p"], 0.7);
}
