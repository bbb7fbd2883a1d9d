use std::fs;
use std::process::Command;

use qsurrogate_harness::output::SWEEP_HEADER;
use qsurrogate_harness::{ExperimentConfig, ExperimentId};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qsurrogate"))
}

#[test]
fn patch2d_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["patch2d-demo", "--seed", "11", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in [
        "config.json",
        "sweep.csv",
        "loss_traces.csv",
        "summary.json",
        "eval_grid.csv",
        "quantum_surrogate.json",
        "classical_surrogate.json",
    ] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let echo = ExperimentConfig::from_json(&fs::read_to_string(dir.path().join("config.json")).unwrap()).unwrap();
    let mut expected = ExperimentConfig::new(ExperimentId::Patch2dDemo);
    expected.seed = 11;
    assert_eq!(echo, expected);

    let mut reader = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), SWEEP_HEADER.to_vec());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[1][10], "25");
    let r2_c_q: f64 = rows[1][8].parse().unwrap();
    assert!(r2_c_q >= 0.999);

    let grid = csv::Reader::from_path(dir.path().join("eval_grid.csv")).unwrap().into_records().count();
    assert_eq!(grid, 39 * 39);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["quantum_calls"], 25);
    assert_eq!(summary["seed"], 11);
}

#[test]
fn print_config_roundtrips() {
    let out = bin().args(["print-config", "qsvm-demo"]).output().unwrap();
    assert!(out.status.success());
    let c = ExperimentConfig::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(c, ExperimentConfig::new(ExperimentId::QsvmDemo));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"experiment":"sweep1d","sweep1d":{"qubit_counts":[]}}"#).unwrap();
    let mismatched = dir.path().join("other.json");
    fs::write(&mismatched, r#"{"experiment":"qsvm_demo"}"#).unwrap();
    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{not json").unwrap();
    let out = dir.path().join("out");

    let code = |args: &[&std::ffi::OsStr]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["sweep1d".as_ref(), "--config".as_ref(), bad.as_os_str()]), Some(2));
    assert_eq!(code(&["sweep1d".as_ref(), "--config".as_ref(), mismatched.as_os_str()]), Some(2));
    assert_eq!(code(&["sweep1d".as_ref(), "--config".as_ref(), garbage.as_os_str()]), Some(2));
    assert_eq!(code(&["wdbc-limits".as_ref(), "--out".as_ref(), out.as_os_str()]), Some(2));
    assert_eq!(code(&["no-such-command".as_ref()]), Some(2));
}

#[test]
fn runtime_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.data");
    let status = bin()
        .arg("wdbc-limits")
        .arg("--wdbc")
        .arg(&missing)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}
