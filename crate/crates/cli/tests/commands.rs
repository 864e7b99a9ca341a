use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use searchbias::report::read_csv;
use searchbias::VerificationReport;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_searchbias"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn usage_error(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(2), "{args:?} should exit 2");
    String::from_utf8(out.stderr).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn bias_on_demo_resources() {
    let demo = data("demo.json");
    let r = json(&["bias", "--resources", &demo, "--target", "0"]);
    assert!((f(&r["bias"]) - 0.375).abs() < 1e-12);
    assert_eq!(r["per_resource"].as_array().unwrap().len(), 2);

    let r = json(&[
        "bias",
        "--resources",
        &demo,
        "--target",
        "0",
        "--weights",
        "1,0",
    ]);
    assert!((f(&r["bias"]) - 0.75).abs() < 1e-12);

    let r = json(&[
        "bias",
        "--resources",
        &data("uniform.json"),
        "--target",
        "1,3",
    ]);
    assert!(f(&r["bias"]).abs() < 1e-12);
}

#[test]
fn bias_over_all_targets_of_a_size() {
    let r = json(&["bias", "--resources", &data("demo.json"), "--target", "k=2"]);
    let targets = r["targets"].as_array().unwrap();
    assert_eq!(targets.len(), 6);
    let biases: Vec<f64> = targets.iter().map(|t| f(&t["bias"])).collect();
    assert!(biases.iter().sum::<f64>().abs() < 1e-12);
    assert!(f(&r["bias_sum"]).abs() < 1e-12);
    let sup = biases.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let inf = biases.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!((f(&r["sup_bias"]) - sup).abs() < 1e-12);
    assert!((f(&r["inf_bias"]) - inf).abs() < 1e-12);
    assert!((f(&r["sup_bias_bound"]) - -inf).abs() < 1e-12);
}

#[test]
fn expressivity_of_point_masses() {
    let r = json(&["expressivity", "--resources", &data("point_masses.json")]);
    assert!((f(&r["entropy_bits"]) - 1.0).abs() < 1e-12);
    assert!(f(&r["expected_entropy"]).abs() < 1e-12);
    assert!((f(&r["jensen_gap"]) - 1.0).abs() < 1e-12);
    assert!((f(&r["kl_to_uniform"]) + f(&r["entropy_bits"]) - 2.0).abs() < 1e-12);
    assert!(f(&r["bias_bound_expected"]) >= f(&r["bias_bound"]));
}

#[test]
fn estimate_edge_cases() {
    let pm = data("point_masses.json");
    let base = [
        "estimate",
        "--resources",
        pm.as_str(),
        "--target",
        "0",
        "--n",
        "100",
    ];
    let r = json(&[&base[..], &["--epsilon", "0.2"]].concat());
    assert!(f(&r["exceedance_frequency"]) <= f(&r["bound"]));
    assert!((f(&r["bound"]) - 2.0 * (-8.0f64).exp()).abs() < 1e-15);

    let r = json(&[&base[..], &["--epsilon", "1.1"]].concat());
    assert_eq!(f(&r["exceedance_frequency"]), 0.0);

    let r = json(&[&base[..], &["--epsilon", "0.2", "--trials", "1"]].concat());
    let freq = f(&r["exceedance_frequency"]);
    assert!(freq == 0.0 || freq == 1.0);

    usage_error(&[
        "estimate",
        "--resources",
        &pm,
        "--target",
        "k=1",
        "--n",
        "5",
        "--epsilon",
        "0.1",
    ]);
}

#[test]
fn fitness_tasks_are_reproducible_per_seed() {
    let tasks = data("tasks.json");
    let args = [
        "bias",
        "--resources",
        tasks.as_str(),
        "--target",
        "1",
        "--runs",
        "200",
        "--seed",
        "3",
    ];
    assert_eq!(ok(&args), ok(&args));
    let r = json(&args);
    let weighted: f64 = r["per_resource"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| f(&x["weight"]) * f(&x["q"]))
        .sum();
    assert!((weighted - 0.2 - f(&r["bias"])).abs() < 1e-12);
}

#[derive(serde::Deserialize)]
struct Fig2 {
    p: f64,
    m: f64,
    bound: f64,
}

#[test]
fn figure2_csv_and_json_agree_and_recompute() {
    let csv_text = ok(&["figure2", "--inf-bias", "-0.4"]);
    let rows: Vec<Fig2> = csv::Reader::from_reader(csv_text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(rows.len(), 19);
    for r in &rows {
        assert!((r.m - (r.p - 1.0) / r.p).abs() < 1e-12);
        assert!((r.bound - r.m * -0.4).abs() < 1e-12);
    }
    assert!(rows.windows(2).all(|w| w[1].bound <= w[0].bound));

    let j = json(&["figure2", "--inf-bias", "-0.4", "--format", "json"]);
    let j = j.as_array().unwrap();
    assert_eq!(j.len(), rows.len());
    for (a, b) in j.iter().zip(&rows) {
        assert!((f(&a["bound"]) - b.bound).abs() < 1e-12);
    }

    let r = json(&[
        "figure2",
        "--inf-bias",
        "-0.5",
        "--p-grid",
        "0.5",
        "--format",
        "json",
    ]);
    assert_eq!(f(&r[0]["m"]), -1.0);
    assert_eq!(f(&r[0]["bound"]), 0.5);
    usage_error(&["figure2", "--inf-bias", "0.1"]);
    usage_error(&["figure2", "--inf-bias", "-0.1", "--p-grid", "1.0"]);
}

#[test]
fn table_csv_matches_closed_forms() {
    let text = ok(&["table", "--n", "4", "--k", "2"]);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    let bits: Vec<[f64; 2]> = rows.iter().map(|r| [r[4], r[5]]).collect();
    assert_eq!(bits, [[0.0, 1.0], [1.0, 2.0], [0.0, 1.0]]);

    let j = json(&["table", "--n", "8", "--k", "2", "--format", "json"]);
    let h = |x: f64| -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
    assert!((f(&j[1]["lower_bits"]) - h(0.25)).abs() < 1e-12);
    assert!((f(&j[1]["upper_bits"]) - 3.0).abs() < 1e-12);

    let err = usage_error(&["table", "--n", "4", "--k", "4"]);
    assert!(err.contains("k"), "{err}");
}

fn verify_report(args: &[&str]) -> VerificationReport {
    VerificationReport::from_json(&ok(&[&["verify"], args].concat())).unwrap()
}

#[test]
fn verify_is_deterministic_per_seed() {
    let args = ["--seed", "7", "--quick", "--max-n", "6"];
    let a = verify_report(&args);
    let b = verify_report(&args);
    assert!(a.all_passed());
    assert_eq!(a.checks, b.checks);
    let c = verify_report(&["--seed", "8", "--quick", "--max-n", "6"]);
    assert_eq!(a.checks.len(), c.checks.len());
}

#[test]
fn verify_only_filters_by_prefix() {
    let r = verify_report(&["--only", "conservation", "--quick"]);
    let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["conservation.bias_sum"]);

    let r = verify_report(&["--only", "famine", "--quick", "--max-n", "6"]);
    assert!(r.checks.len() >= 3);
    assert!(r.checks.iter().all(|c| c.name.starts_with("famine.")));

    let err = usage_error(&["verify", "--only", "no_such_check"]);
    assert!(err.contains("no_such_check"), "{err}");
}

#[test]
fn verify_csv_round_trips_against_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("report.csv");
    let json_path = dir.path().join("report.json");
    let common = [
        "verify",
        "--seed",
        "3",
        "--quick",
        "--max-n",
        "5",
        "--only",
        "expressivity",
    ];
    let csv_path_s = csv_path.display().to_string();
    let json_path_s = json_path.display().to_string();
    ok(&[&common[..], &["--format", "csv", "--out", &csv_path_s]].concat());
    ok(&[&common[..], &["--out", &json_path_s]].concat());

    let from_csv = read_csv(std::fs::File::open(&csv_path).unwrap()).unwrap();
    let from_json =
        VerificationReport::from_json(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(from_csv.len(), from_json.checks.len());
    for (a, b) in from_csv.iter().zip(&from_json.checks) {
        assert_eq!(a.name, b.name);
        assert_eq!(a.passed, b.passed);
        assert!((a.observed - b.observed).abs() <= 1e-12 * b.observed.abs().max(1.0));
        assert!(
            (a.bound_or_expected - b.bound_or_expected).abs()
                <= 1e-12 * b.bound_or_expected.abs().max(1.0)
        );
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.csv");
    let p = path.display().to_string();
    let stdout = ok(&["figure2", "--inf-bias", "-0.2"]);
    assert!(ok(&["figure2", "--inf-bias", "-0.2", "--out", &p]).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
}

#[test]
fn bad_inputs_exit_with_status_two() {
    let err = usage_error(&[
        "bias",
        "--resources",
        "/nonexistent/file.json",
        "--target",
        "0",
    ]);
    assert!(err.contains("/nonexistent/file.json"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"omega_size": 3, "resources": [{"id": "a", "strategy": [0.5, 0.5]}]}"#,
    )
    .unwrap();
    let err = usage_error(&[
        "bias",
        "--resources",
        &bad.display().to_string(),
        "--target",
        "0",
    ]);
    assert!(err.contains("resources[0].strategy"), "{err}");

    std::fs::write(&bad, "{\n  \"omega_size\": 3,\n  oops\n}").unwrap();
    let err = usage_error(&["expressivity", "--resources", &bad.display().to_string()]);
    assert!(err.contains("line 3"), "{err}");

    let demo = data("demo.json");
    usage_error(&["bias", "--resources", &demo, "--target", "7"]);
    usage_error(&[
        "bias",
        "--resources",
        &demo,
        "--target",
        "0",
        "--weights",
        "0.5",
    ]);
    usage_error(&[
        "bias",
        "--resources",
        &demo,
        "--target",
        "0",
        "--format",
        "csv",
    ]);
    usage_error(&["bias", "--resources", &demo]);
    usage_error(&["no-such-command"]);
}
