use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn singlim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_singlim")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

const GRID: &str = r#"
[grid]
n_modes = 1024
half_length = 8.0
horizon = 0.2
samples = 9
"#;

fn single(id: &str) -> String {
    format!(
        r#"
[model]
kind = "rosenau"
epsilon = 0.2
beta = 0.0016
{GRID}
[initial]
profile = {{ type = "mollified_riemann", u_left = 1.0, u_right = 0.0, x_jump = 0.0 }}

[output]
id = "{id}"
profile_times = [0.1, 0.2]
"#
    )
}

fn sweep(id: &str) -> String {
    format!(
        r#"
[model]
kind = "rosenau"
{GRID}
[initial]
profile = {{ type = "mollified_riemann", u_left = 1.0, u_right = 0.0, x_jump = 0.0 }}

[sweep]
regime = "big_O_4"
constant = 1.0
epsilons = [0.2, 0.1]
window = [-1.5, 1.5]

[output]
id = "{id}"
"#
    )
}

fn out_arg(tmp: &TempDir) -> String {
    tmp.path().join("runs").to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_run_directory() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "one.toml", &single("one"));
    let out = singlim(&["simulate", cfg.to_str().unwrap(), "--out", &out_arg(&tmp)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("runs/one");
    for f in ["manifest.json", "norms.csv", "scaling.csv", "residuals.csv", "profile_t0.1.csv", "profile_t0.2.csv"] {
        assert!(dir.join(f).is_file(), "missing {f}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["id"], "one");
    assert_eq!(manifest["body"]["command"], "simulate");
    let profile = fs::read_to_string(dir.join("profile_t0.2.csv")).unwrap();
    assert_eq!(profile.lines().count(), 1025);
}

#[test]
fn sweep_then_report_regenerates_tables() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "sw.toml", &sweep("sw"));
    let out = singlim(&["sweep", cfg.to_str().unwrap(), "--out", &out_arg(&tmp)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("runs/sw");
    let table = fs::read_to_string(dir.join("sweep.csv")).unwrap();
    assert!(table.starts_with("epsilon,beta,L1_error"));
    assert_eq!(table.lines().count(), 3);
    for line in table.lines().skip(1) {
        let l1 = line.split(',').nth(2).unwrap();
        assert!(l1.parse::<f64>().unwrap() > 0.0, "row without an error: {line}");
    }
    assert!(dir.join("profile_t0.2.csv").is_file());

    fs::remove_file(dir.join("sweep.csv")).unwrap();
    fs::remove_file(dir.join("norms.csv")).unwrap();
    let out = singlim(&["report", &out_arg(&tmp)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(dir.join("sweep.csv")).unwrap(), table);
    assert!(dir.join("norms.csv").is_file());
    assert!(String::from_utf8_lossy(&out.stdout).contains("sweep `sw`"));
}

#[test]
fn oracle_writes_reference() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "or.toml", &single("or"));
    let out = singlim(&["oracle", cfg.to_str().unwrap(), "--out", &out_arg(&tmp)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("runs/or/oracle_full_square_t0.2.csv").is_file());
}

#[test]
fn config_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(singlim(&["simulate", tmp.path().join("absent.toml").to_str().unwrap()]).status.code(), Some(2));
    let bad = write_config(tmp.path(), "bad.toml", &single("x").replace("epsilon = 0.2", "epsilon = -1.0"));
    assert_eq!(singlim(&["simulate", bad.to_str().unwrap()]).status.code(), Some(2));
    let unknown = write_config(tmp.path(), "unknown.toml", &format!("{}\nbogus = 1\n", single("x")));
    assert_eq!(singlim(&["simulate", unknown.to_str().unwrap()]).status.code(), Some(2));
    let no_sweep = write_config(tmp.path(), "nosweep.toml", &single("x"));
    assert_eq!(singlim(&["sweep", no_sweep.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(singlim(&["report", tmp.path().join("empty").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let tmp = TempDir::new().unwrap();
    // a blow-up threshold below the data amplitude
    let body = single("blow").replace("samples = 9\n", "samples = 9\nguards = { blowup_threshold = 0.5 }\n");
    let cfg = write_config(tmp.path(), "blow.toml", &body);
    let out = singlim(&["simulate", cfg.to_str().unwrap(), "--out", &out_arg(&tmp)]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blow-up"));
}

#[test]
fn oracle_refinement_failure_exits_4() {
    let tmp = TempDir::new().unwrap();
    // starting from 16 cells the refinement cannot reach tolerance by t = 1
    let body = single("coarse").replace("n_modes = 1024", "n_modes = 16").replace("horizon = 0.2", "horizon = 1.0");
    let cfg = write_config(tmp.path(), "coarse.toml", &body);
    let out = singlim(&["oracle", cfg.to_str().unwrap(), "--out", &out_arg(&tmp)]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}
