use std::process::{Command, Output};

use fermitheta::lab::ExperimentReport;
use serde_json::Value;

fn fermitheta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermitheta"))
        .args(args)
        .env_remove("FERMITHETA_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn theta_johnson_prints_value_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theta.json");
    let o = fermitheta(&["theta", "johnson", "--n", "8", "--q", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "14");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["exact"], "14");
    assert_eq!(v["method"], "johnson-lp-exact");

    let o = fermitheta(&["theta", "johnson", "--n", "10", "--q", "4", "--exact-output"]);
    assert_eq!(stdout(&o).trim(), "102/7");
}

#[test]
fn ternary_lists_operators() {
    let o = fermitheta(&["ternary", "--k", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), ["X", "Y", "Z"]);
    assert_eq!(stdout(&fermitheta(&["ternary", "--k", "2"])).lines().count(), 9);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&fermitheta(&["theta", "johnson", "--n", "9", "--q", "4"])), 2);
    assert_eq!(code(&fermitheta(&["theta", "johnson", "--n", "8", "--q", "4", "--bogus"])), 2);
    assert_eq!(code(&fermitheta(&["nonsense"])), 2);
    assert_eq!(code(&fermitheta(&["model", "syk", "--n", "40", "--loc", "4"])), 3);
    assert_eq!(code(&fermitheta(&["--help"])), 0);
    // a zero tolerance cannot be met by a finite-difference gradient
    let o = fermitheta(&["lab", "gradcheck", "--n", "6", "--loc", "2", "--beta", "0.5", "--tol", "0"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn table_rows() {
    let o = fermitheta(&["table", "--max-n", "28", "--qs", "2,6"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,q,theta_exact_rational,theta_2dp,binom,equal_flag"));
    assert!(out.lines().any(|l| l == "2,2,1,1.00,1,true"));
    assert!(out.lines().any(|l| l == "28,6,364,364.00,364,true"));
    assert!(out.lines().any(|l| l == "12,6,52,52.00,20,false"));
    let o = fermitheta(&["theta", "--table", "--max-n", "8", "--qs", "4"]);
    assert!(stdout(&o).lines().any(|l| l == "8,4,14,14.00,6,false"));
    assert_eq!(code(&fermitheta(&["table", "--max-n", "42"])), 2);
}

#[test]
fn hahn_graph_index_bounds() {
    let o = fermitheta(&["hahn", "--m", "6", "--r", "2"]);
    let out = stdout(&o);
    assert!(out.starts_with("m,r,d,x,value\n"));
    assert_eq!(out.lines().count(), 1 + 9);
    let v: Value = serde_json::from_str(&stdout(&fermitheta(&["hahn", "--m", "7", "--r", "3", "--verify"]))).unwrap();
    assert_eq!(v["all_matched"], true);

    let o = fermitheta(&["graph", "--set", "majorana", "--n", "4", "--loc", "2", "--format", "csv"]);
    // six quadratic monomials on four modes; each anticommutes with four others
    assert_eq!(stdout(&o).lines().count(), 1 + 12);
    let v: Value = serde_json::from_str(&stdout(&fermitheta(&["graph", "--set", "pauli", "--n", "2", "--loc", "1"]))).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);

    let v: Value =
        serde_json::from_str(&stdout(&fermitheta(&["index", "--set", "majorana", "--n", "6", "--loc", "2"]))).unwrap();
    assert_eq!(v["exact_rational"], "1/5");

    let o = fermitheta(&["bounds", "--n", "100", "--q", "4", "--t", "0.5", "--gateset", "64", "--delta", "0.001"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["sigma2"].as_f64().unwrap() - 1225.0 / 3921225.0).abs() < 1e-15);
    assert!(v["circuit_gate_threshold"].as_u64().unwrap() > 0);
}

#[test]
fn model_summary_and_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    let o = fermitheta(&["model", "syk", "--n", "8", "--loc", "4", "--seed", "3", "--spectrum", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let summary: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let spec: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let levels: Vec<f64> = spec["levels"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(levels.len(), 16);
    assert_eq!(summary["lambda_max"].as_f64().unwrap(), levels[15]);
    let o = fermitheta(&["model", "classical", "--n", "6", "--loc", "2"]);
    assert_eq!(serde_json::from_str::<Value>(&stdout(&o)).unwrap()["configurations"], 64);
}

#[test]
fn lab_report_round_trips_and_is_seed_determined() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let json = dir.path().join(format!("{name}.json"));
        let csv = dir.path().join(format!("{name}.csv"));
        let o = fermitheta(&[
            "--threads", threads, "lab", "free-energy", "--n", "6", "--loc", "2", "--beta", "0.5,1", "--samples", "32",
            "--seed", "9", "--out", json.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let report = ExperimentReport::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
        (report, std::fs::read_to_string(&csv).unwrap())
    };
    let (a, csv_a) = run("1", "a");
    let (b, csv_b) = run("2", "b");
    assert_eq!(a.records, b.records);
    assert_eq!(csv_a, csv_b);
    assert_eq!(a.records.len(), 32);
    assert_eq!(a.params["run_config"]["threads"], 1);
    assert_eq!(b.params["run_config"]["threads"], 2);
    assert!(a.passed());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# lab defaults\nsamples = 20\nseed = 4\nbeta = 0.5\nunused_key = 1\n").unwrap();
    let out = dir.path().join("r.json");
    let o = fermitheta(&[
        "--config", conf.to_str().unwrap(), "lab", "variance", "--n", "6", "--loc", "2", "--seed", "8", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = ExperimentReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.seed, 8);
    assert_eq!(r.records.len(), 20);
    let missing = fermitheta(&["--config", "/nonexistent/run.conf", "ternary", "--k", "1"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn threads_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_fermitheta"))
        .args(["lab", "variance", "--n", "6", "--loc", "2", "--samples", "16"])
        .env("FERMITHETA_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["params"]["run_config"]["threads"], 3);
}
