use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nvsensor"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn nvsensor")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn validate_model_default_constants_pass() {
    let out = run(&["validate-model"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], true);
    assert!(v["detuning_ratio"].as_f64().unwrap() > 100.0);
    assert!(v["trace_distance_max"].as_f64().unwrap() < 1e-2);
}

#[test]
fn validate_model_unit_ratio_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "weak.toml", "[constants]\nb_ex = 9.63e-5\nb = 0.0\n");
    let out = run(&["validate-model", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], false);
    assert!((v["detuning_ratio"].as_f64().unwrap() - 1.0).abs() < 0.01);
}

#[test]
fn malformed_config_exits_two_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "[sensor\nalpha = ");
    let out = run(&["validate-model", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("invalid config"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["figure3", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    assert_eq!(run(&["validate-model", "--format", "csv"]).status.code(), Some(2));
    let out = bin().arg("transcript").env("NVSENSOR_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_trajectories_agree_with_channel() {
    let out = run(&["simulate", "--seed", "11", "--reps", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let z = v["trajectory_z"].as_f64().unwrap();
    assert!(z.abs() < 3.0, "z = {z}");
    assert_eq!(v["estimation"]["estimates"].as_array().unwrap().len(), 50);
    assert_eq!(v["seed"], 11);
}

#[test]
fn single_transfer_matches_conventional_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n1.toml", "seed = 3\n[sensor]\nn_transfers = 1\nomega = 2e5\n[run]\nrepetitions = 10\nshots = 1000\n");
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let hybrid = v["exact"]["p_click"].as_f64().unwrap();
    let conv = v["conventional"]["p_click"].as_f64().unwrap();
    assert!((hybrid - conv).abs() < 1e-13, "{hybrid} vs {conv}");
}

#[test]
fn phase_wrap_is_a_regime_error() {
    let out = run(&["simulate", "--seed", "1", "--config", "/dev/null"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "wrap.toml", "seed = 1\n[sensor]\nomega = 1e7\n");
    assert_eq!(run(&["simulate", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.toml", "seed = 99\n[run]\nrepetitions = 30\nshots = 5000\nsampling = \"trajectory\"\n[sensor]\nshots_m = 500\n");
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "4"].iter().enumerate() {
        let out_dir = dir.path().join(format!("run{i}"));
        let status = bin()
            .args(["simulate", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()])
            .env("NVSENSOR_THREADS", threads)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        outputs.push(std::fs::read(out_dir.join("simulation.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn figure3_csv_schema_and_landmarks() {
    let out = run(&["figure3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "epsilon,r_star,N_star,alpha_star,capped");
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 61);
    let tenth = rows
        .iter()
        .find(|r| (r[0].parse::<f64>().unwrap() - 1e-3).abs() < 1e-12)
        .expect("grid contains 1e-3");
    assert!((tenth[1].parse::<f64>().unwrap() - 9.58).abs() < 0.01);

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "be.toml", "[run]\neps_grid = [0.075, 0.076]\n");
    let out = run(&["figure3", "--config", cfg.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let r: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(r[0] > 1.0 && r[1] < 1.0, "{r:?}");
}

#[test]
fn figure3_svg_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fig");
    let out = run(&["figure3", "--format", "svg", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(out_dir.join("figure3.svg")).unwrap().starts_with("<svg"));
    assert!(std::fs::read_to_string(out_dir.join("figure3.csv")).unwrap().starts_with("epsilon,"));
    let json = run(&["figure3", "--format", "json"]);
    let v = stdout_json(&json);
    let b = v["breakeven_epsilon"].as_f64().unwrap();
    assert!((0.070..0.080).contains(&b));
}

#[test]
fn sweep_n_table() {
    let out = run(&["sweep-n", "--reps", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scheme,N,alpha,epsilon,M,delta_omega,ratio_r,delta_omega_empirical"
    );
    let first = lines.next().unwrap();
    assert!(first.starts_with("conventional,1,"));
    assert!(first.ends_with(','));
    let with_mc = run(&["sweep-n", "--reps", "20", "--seed", "4", "--format", "json"]);
    assert_eq!(with_mc.status.code(), Some(0));
    let rows = stdout_json(&with_mc);
    assert!(rows[1]["delta_omega_empirical"].as_f64().unwrap() > 0.0);
}

#[test]
fn time_budget_reference_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "tb.toml",
        "[sensor]\nn_transfers = 100\nt2e = 3e-7\n[timing]\ntau_w = 25e-6\ntau_p = 2e-6\ntau_m = 2e-6\ntotal_time = 1.0\n",
    );
    let out = run(&["time-budget", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["budget"]["t_cycle_hybrid"].as_f64().unwrap(), 2.5e-3);
    assert!((v["budget"]["t_cycle_conv"].as_f64().unwrap() - 4.212e-6).abs() < 1e-9);
    assert!(v["fixed_total_time"]["ratio_r"].as_f64().unwrap() < v["fixed_shots"]["ratio_r"].as_f64().unwrap());
}

#[test]
fn transcript_formats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.toml", "[sensor]\nn_transfers = 3\n");
    let text = run(&["transcript", "--config", cfg.to_str().unwrap()]);
    assert_eq!(String::from_utf8(text.stdout).unwrap().matches("CNOT").count(), 6);
    let json = run(&["transcript", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let steps = stdout_json(&json);
    // 2N CNOTs, N waits, SWAP, two rotations, measurement
    assert_eq!(steps.as_array().unwrap().len(), 2 * 3 + 3 + 1 + 2 + 1);
    assert_eq!(steps[0]["op"], "rot_y");
}
