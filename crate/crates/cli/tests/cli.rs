use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn subshift(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subshift"))
        .env_remove("SUBSHIFT_OUT_DIR")
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is one JSON line")
}

fn artifact(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn gen_writes_header_and_window() {
    let d = tempfile::tempdir().unwrap();
    let o = subshift(d.path(), &["--window", "8", "--depth", "4", "gen"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = artifact(d.path(), "window.json");
    assert_eq!(doc["schema_version"], "1");
    assert_eq!(doc["command"], "gen");
    assert_eq!(doc["verdict"], "pass");
    assert_eq!(doc["data"]["length"], 16);
    let txt = std::fs::read_to_string(d.path().join("window.txt")).unwrap();
    assert!(txt.trim_end().ends_with(".01101001"), "{txt}");
}

#[test]
fn disagree_on_periodic_control_fails_with_witness() {
    let d = tempfile::tempdir().unwrap();
    let o = subshift(d.path(), &["--kind", "periodic", "--pattern", "01", "disagree"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["failure"]["witness"], "01");
}

#[test]
fn k_beyond_depth_is_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let o = subshift(d.path(), &["--depth", "6", "k"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("usage error"));
}

#[test]
fn invalid_config_file_is_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("bad.toml");
    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    let o = subshift(d.path(), &["--config", cfg.to_str().unwrap(), "gen"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_file_values() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.toml");
    std::fs::write(&cfg, "kind = \"periodic\"\npattern = \"01\"\ndepth = 6\nwindow = 64\n").unwrap();
    let out = d.path().join("out");
    let o = subshift(&out, &["--config", cfg.to_str().unwrap(), "--kind", "substitution", "disagree"]);
    // Thue-Morse at depth 6 cannot support the default certificate depth.
    assert_eq!(o.status.code(), Some(2));
    let o = subshift(&out, &["--config", cfg.to_str().unwrap(), "disagree"]);
    assert_eq!(o.status.code(), Some(2));
    let o = subshift(&out, &["--config", cfg.to_str().unwrap(), "--depth", "24", "disagree"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn env_var_sets_output_directory() {
    let d = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_subshift"))
        .env("SUBSHIFT_OUT_DIR", d.path())
        .args(["--window", "8", "--depth", "4", "gen"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(d.path().join("window.json").exists());
}

#[test]
fn formats_gate_artifacts() {
    let d = tempfile::tempdir().unwrap();
    let o = subshift(d.path(), &["--formats", "csv", "phi"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(d.path().join("phi.csv").exists());
    assert!(!d.path().join("phi.json").exists());
}

#[test]
fn verify_all_is_conjunction_of_commands() {
    let d = tempfile::tempdir().unwrap();
    let all = subshift(d.path(), &["--kind", "periodic", "--pattern", "01", "verify-all"]);
    assert_eq!(all.status.code(), Some(1));
    let summary = artifact(d.path(), "summary.json");
    for check in summary["data"]["checks"].as_array().unwrap() {
        let name = check["command"].as_str().unwrap();
        let single = subshift(&d.path().join(name), &["--kind", "periodic", "--pattern", "01", name]);
        assert_eq!(single.status.code() == Some(0), check["pass"].as_bool().unwrap(), "{name}");
    }
}

#[test]
fn fibonacci_passes_with_fourth_power_ceiling() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("fib.toml");
    std::fs::write(
        &cfg,
        "rules = \"0:01,1:0\"\nseed = \"0.0\"\npower = 2\ndepth = 32\n[levels]\ndisagree_ceiling = 4\n",
    )
    .unwrap();
    let o = subshift(&d.path().join("out"), &["--config", cfg.to_str().unwrap(), "verify-all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}
