use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnn-witness"))
        .args(args)
        .current_dir(dir)
        .env_remove("QNN_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn witness(dir: &Path, state: &str, method: &str) -> f64 {
    let o = run(&["witness", "--schedule", "table2", "--state", state, "--method", method, "--pair", "0,1"], dir);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("state_kind,pair,method,value"));
    let row = lines.next().unwrap();
    assert!(row.starts_with(&format!("{state},0-1,{method},")));
    row.rsplit(',').next().unwrap().parse().unwrap()
}

#[test]
fn witness_rows() {
    let dir = tempfile::tempdir().unwrap();
    assert!((witness(dir.path(), "bell", "chunked") - 0.999).abs() < 5e-3);
    assert!(witness(dir.path(), "flat", "gates") <= 1e-3);
}

#[test]
fn malformed_schedule_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"n_qubits":2,"total_time":1.58,"symmetric":true,"chunks":[{"K":[1,1],"eps":[0,0],"zeta":{"0,1":0},"kappa":1}]}"#).unwrap();
    let o = run(&["witness", "--schedule", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kappa"), "{}", stderr(&o));
}

#[test]
fn dimension_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["witness", "--pair", "0,5"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).is_empty());
}

#[test]
fn verify_passes_and_detects_perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--schedule", "table2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["frobenius_gate_vs_chunked"].as_f64().unwrap() < 1e-12);
    let o = run(&["verify", "--schedule", "table2", "--perturb-angle", "1e-3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_reports_commuting_schedule_as_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zeta0.json");
    let chunk = r#"{"K":[2.0,2.0,2.0],"eps":[0.1,0.1,0.1],"zeta":{"0,1":0,"0,2":0,"1,2":0}}"#;
    fs::write(&path, format!(r#"{{"n_qubits":3,"total_time":1.58,"symmetric":true,"chunks":[{chunk},{chunk}]}}"#)).unwrap();
    let o = run(&["verify", "--schedule", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["frobenius_chunked_vs_exact"].as_f64().unwrap() < 1e-12);
}

#[test]
fn compile_counts_and_qasm() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["compile", "--schedule", "table2", "--no-elide", "--out-dir", "c"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1q=28 2q=8");
    let qasm = fs::read_to_string(dir.path().join("c/circuit.qasm")).unwrap();
    assert_eq!(count_gate_lines(&qasm), 36);
    let o = run(&["compile", "--schedule", "table3", "--out-dir", "c"], dir.path());
    assert_eq!(stdout(&o).trim(), "1q=168 2q=168");
}

fn count_gate_lines(qasm: &str) -> usize {
    qasm.lines().filter(|l| l.starts_with("ry(") || l.starts_with("rz(") || l.starts_with("cx ")).count()
}

#[test]
fn compile_zero_schedule_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    let chunk = r#"{"K":[0,0],"eps":[0,0],"zeta":{"0,1":0}}"#;
    fs::write(&path, format!(r#"{{"n_qubits":2,"total_time":1.58,"symmetric":true,"chunks":[{chunk}]}}"#)).unwrap();
    let o = run(&["compile", "--schedule", path.to_str().unwrap(), "--out-dir", "."], dir.path());
    assert_eq!(stdout(&o).trim(), "1q=0 2q=0");
}

#[test]
fn config_file_defaults_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.json"), r#"{"state":"flat","method":"gates"}"#).unwrap();
    let o = run(&["--config", "run.json", "witness"], dir.path());
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("flat,0-1,gates,"));
    let o = run(&["--config", "run.json", "witness", "--state", "bell"], dir.path());
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("bell,0-1,gates,"));
    fs::write(dir.path().join("bad.json"), r#"{"state":"flat","colour":1}"#).unwrap();
    let o = run(&["--config", "bad.json", "witness"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn train_evaluation_only_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["train", "--schedule", "table2", "--max-epochs", "0", "--out-dir", "e"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let history = fs::read_to_string(dir.path().join("e/rms_history.csv")).unwrap();
    let rms: f64 = history.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(rms <= 5e-3);
    assert_eq!(history.lines().count(), 2);

    for out in ["a", "b"] {
        let o = run(&["train", "--n-qubits", "2", "--seed", "3", "--out-dir", out], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for file in ["schedule.json", "rms_history.csv"] {
        assert_eq!(
            fs::read(dir.path().join("a").join(file)).unwrap(),
            fs::read(dir.path().join("b").join(file)).unwrap()
        );
    }
}

#[test]
fn divergence_saves_last_good() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["train", "--schedule", "table2", "--learning-rate", "200", "--momentum", "0", "--out-dir", "d"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(dir.path().join("d/last_good.json").exists());
}

#[test]
fn bootstrap_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bootstrap", "--from", "2", "--n-qubits", "4", "--out-dir", "b"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = fs::read_to_string(dir.path().join("b/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 4);
    assert!(summary.starts_with("n_qubits,epochs,initial_rms,final_rms,K_1"));
    for n in 2..=4 {
        assert!(dir.path().join(format!("b/schedule_n{n}.json")).exists());
    }
}

#[test]
fn sample_grid_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sample", "--state", "bell", "--iterations", "2", "--out-dir", "g"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let grid = fs::read_to_string(dir.path().join("g/shots_bell.csv")).unwrap();
    assert_eq!(grid.lines().count(), 401);

    for out in ["x", "y"] {
        let o = run(&["sample", "--state", "p", "--shots", "100:1000:300", "--seed", "5", "--out-dir", out], dir.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let x = fs::read(dir.path().join("x/shots_p.csv")).unwrap();
    assert_eq!(x, fs::read(dir.path().join("y/shots_p.csv")).unwrap());
    assert_eq!(String::from_utf8(x).unwrap().lines().count(), 5);
}

#[test]
fn sample_bell_confidence_width() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sample", "--state", "bell", "--shots", "15000", "--iterations", "100", "--out-dir", "."], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("shots_bell.csv")).unwrap();
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let (low, high) = (row[3], row[4]);
    assert!((high - low) / 2.0 <= 0.002);
}

#[test]
fn bad_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["witness", "--state", "ghz"][..],
        &["witness", "--pair", "1"],
        &["sample", "--shots", "10:5:1"],
        &["witness", "--schedule", "missing.json"],
        &["witness", "--chunks", "3"],
    ] {
        let o = run(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = Command::new(env!("CARGO_BIN_EXE_qnn-witness"))
        .args(["witness"])
        .env("QNN_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn list_repro_covers_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--list-repro"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for id in ["table1", "table2", "table3", "table4", "fig1", "fig2", "fig3", "fig4", "fig5", "gate-counts"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id}");
    }
}
