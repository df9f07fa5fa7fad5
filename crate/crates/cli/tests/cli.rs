//! Exit codes, diagnostics and config handling of the binary.

use std::path::Path;
use std::process::{Command, Output};

fn hyperalg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperalg"))
        .args(args)
        .current_dir(dir)
        .env_remove("HYPERALG_THREADS")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_seed_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperalg(dir.path(), &["roundtrip"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing required --seed"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2_and_help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(hyperalg(dir.path(), &["nonsense"]).status.code(), Some(2));
    assert_eq!(hyperalg(dir.path(), &["capacity", "--dim", "many"]).status.code(), Some(2));
    assert_eq!(hyperalg(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn config_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "seed = 1\n[capacity]\ndim = 0\n").unwrap();
    let o = hyperalg(dir.path(), &["capacity", "--config", "run.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("run.toml:3: invalid `dim`"), "{}", stderr(&o));

    std::fs::write(dir.path().join("typo.toml"), "[roundtrip]\nseed = 1\nitemz = 4\n").unwrap();
    let o = hyperalg(dir.path(), &["roundtrip", "--config", "typo.toml"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("typo.toml:3:"), "{}", stderr(&o));
}

#[test]
fn runtime_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperalg(dir.path(), &["encode", "--input", "absent.txt", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = hyperalg(dir.path(), &["roundtrip", "--seed", "1", "--out", "no/such/dir/r.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not a directory"), "{}", stderr(&o));
    std::fs::write(dir.path().join("bad.edges"), "a b\na\n").unwrap();
    let o = hyperalg(dir.path(), &["encode", "--input", "bad.edges", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.edges:2:"), "{}", stderr(&o));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hyperalg"))
        .args(["roundtrip", "--seed", "1"])
        .current_dir(dir.path())
        .env("HYPERALG_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn manifest_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let args = [
        "capacity",
        "--model",
        "map",
        "--dim",
        "64",
        "--items",
        "8",
        "--lengths",
        "2..4",
        "--runs",
        "1",
        "--trials",
        "1000",
        "--stats-trials",
        "1000",
        "--seed",
        "3",
        "--out",
        "a.csv",
    ];
    assert!(hyperalg(p, &args).status.success());
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(p.join("a.json")).unwrap()).unwrap();
    std::fs::write(p.join("replay.toml"), manifest["config_toml"].as_str().unwrap()).unwrap();
    let o = hyperalg(p, &["capacity", "--config", "replay.toml", "--out", "b.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(p.join("a.csv")).unwrap(), std::fs::read(p.join("b.csv")).unwrap());
    let csv = std::fs::read_to_string(p.join("a.csv")).unwrap();
    assert!(csv.starts_with("model,D,N,m,trials,empirical_acc,analytic_pcorr,seed\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn concentration_prints_fits_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperalg(dir.path(), &["concentration", "--dims", "64", "--count", "50", "--seed", "2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("D,count,pairs,mean,std,inv_sqrt_d\n64,50,1225,"), "{text}");
}
