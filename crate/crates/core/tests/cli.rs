use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn nami(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nami")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(o: &Output) -> Value {
    assert_eq!(code(o), 0, "{}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn assert_schema(command: &str, v: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("schema/{command}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{command}: {errors:?}");
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn survival_fixture_report() {
    let data = fixture("survival.csv");
    let out =
        nami(&["fit", "--data", path_str(&data), "--treatment", "arm", "--outcome", "time", "--kind", "survival", "--covariate", "age"]);
    let v = report(&out);
    assert_schema("fit", &v);
    let r = &v["result"];
    assert_eq!(r["effect"], "log-hazard ratio");
    assert!(r["tau_hat"].is_f64());
    let ci = r["ci"].as_array().unwrap();
    assert!(ci[0].as_f64().unwrap() < r["tau_hat"].as_f64().unwrap() && r["tau_hat"].as_f64().unwrap() < ci[1].as_f64().unwrap());
    let r2 = r["r_squared"].as_f64().unwrap();
    assert!((0.0..1.0).contains(&r2));
    assert_eq!(v["config"]["outcome_basis"]["kind"], "log_bernstein");
    assert!(r["probabilistic_index"].is_null());
}

#[test]
fn mi_binary_is_two_by_two_log_odds_ratio() {
    let data = fixture("binary.csv");
    let mut counts = [[0.0f64; 2]; 2];
    let text = std::fs::read_to_string(&data).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        counts[f[0].parse::<usize>().unwrap()][usize::from(f[2] == "yes")] += 1.0;
    }
    let want = (counts[1][1] / counts[1][0]).ln() - (counts[0][1] / counts[0][0]).ln();
    let v = report(&nami(&[
        "fit",
        "--data",
        path_str(&data),
        "--treatment",
        "treated",
        "--outcome",
        "response",
        "--kind",
        "binary",
        "--method",
        "mi",
    ]));
    assert_schema("fit", &v);
    assert_eq!(v["result"]["effect"], "log-odds ratio");
    let got = v["result"]["tau_hat"].as_f64().unwrap();
    assert!((got - want).abs() < 1e-5, "{got} vs {want}");
    let se = v["result"]["se"].as_f64().unwrap();
    let want_se = counts.iter().flatten().map(|c| 1.0 / c).sum::<f64>().sqrt();
    assert!((se - want_se).abs() < 1e-4, "{se} vs {want_se}");
}

#[test]
fn nami_reports_retained_missing_values() {
    let data = fixture("binary.csv");
    let out = nami(&[
        "fit",
        "--data",
        path_str(&data),
        "--treatment",
        "treated",
        "--outcome",
        "response",
        "--kind",
        "binary",
        "--covariate",
        "score",
    ]);
    let v = report(&out);
    assert_schema("fit", &v);
    assert_eq!(v["result"]["n_used"], 160);
    let warnings = v["result"]["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().starts_with("6 missing values retained")), "{warnings:?}");
    assert!(stderr(&out).contains("6 missing values retained"));
}

#[test]
fn nami_without_covariates_is_a_user_error() {
    let data = fixture("binary.csv");
    let out = nami(&["fit", "--data", path_str(&data), "--treatment", "treated", "--outcome", "response", "--kind", "binary"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("nami requires ≥1 covariate"), "{}", stderr(&out));
}

#[test]
fn exit_codes() {
    let sep = fixture("separated.csv");
    let out =
        nami(&["fit", "--data", path_str(&sep), "--treatment", "treated", "--outcome", "response", "--kind", "binary", "--method", "mi"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert_eq!(code(&nami(&["fit", "--bogus"])), 2);
    assert_eq!(code(&nami(&["samplesize", "--kind", "continuous", "--tau", "0"])), 2);
    let missing =
        nami(&["fit", "--data", path_str(&fixture("binary.csv")), "--treatment", "arm", "--outcome", "response", "--method", "mi"]);
    assert_eq!(code(&missing), 2);
    assert!(stderr(&missing).contains("\"arm\" not found"));
    assert_eq!(code(&nami(&["--version"])), 0);
}

#[test]
fn samplesize_and_se_reports() {
    let v = report(&nami(&["samplesize", "--kind", "continuous", "--tau", "0.5", "--power", "0.6"]));
    assert_schema("samplesize", &v);
    assert_eq!(v["result"]["per_arm"], 41);
    let v = report(&nami(&["samplesize", "--kind", "binary", "--tau", "-0.5", "--power", "0.6", "--p-control", "0.5"]));
    assert_schema("samplesize", &v);
    assert_eq!(v["result"]["per_arm"], 161);
    let v = report(&nami(&["samplesize", "--kind", "survival", "--tau", "0.5", "--power", "0.6", "--p-control", "0.3"]));
    assert_eq!(v["result"]["per_arm"], 131);

    let v = report(&nami(&["se", "--tau", "-0.002", "--n", "80", "--lambda", "-0.8"]));
    assert_schema("se", &v);
    assert!((v["result"]["se_adjusted"].as_f64().unwrap() - 0.175).abs() < 5e-4);
    assert!((v["result"]["se_unadjusted"].as_f64().unwrap() - 0.2236).abs() < 5e-4);
    let v = report(&nami(&["se", "--tau", "0.5", "--n", "82", "--rho", "0.6"]));
    assert_schema("se", &v);
    let frac = v["result"]["sample_size_fraction"].as_f64().unwrap();
    assert!(frac > 0.6 && frac < 0.7, "{frac}");
}

#[test]
fn diagnose_report() {
    let data = fixture("survival.csv");
    let v = report(&nami(&[
        "diagnose",
        "--data",
        path_str(&data),
        "--treatment",
        "arm",
        "--outcome",
        "time",
        "--kind",
        "survival",
        "--link",
        "cloglog",
    ]));
    assert_schema("diagnose", &v);
    let points = v["result"].as_array().unwrap();
    assert!(points.iter().any(|p| p["arm"] == 0) && points.iter().any(|p| p["arm"] == 1));
}

fn scenario_file(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn simulate_report_and_liberality_warning() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario_file(dir.path(), "seed = 5\nreplications = 2\nmethods = [\"nami\"]\n[dgp]\nkind = \"copula\"\noutcome = \"continuous\"\ntau = 0.0\nrho = 0.6\np = 15\nn = 82\n");
    let records = dir.path().join("records.csv");
    let out = nami(&["simulate", "--config", path_str(&cfg), "--records", path_str(&records)]);
    let v = report(&out);
    assert_schema("simulate", &v);
    assert!(stderr(&out).contains("expected to be liberal"), "{}", stderr(&out));
    assert!(v["result"]["warnings"][0].as_str().unwrap().contains("N = 82"));
    assert_eq!(v["config"]["seed"], 5);
    let text = std::fs::read_to_string(records).unwrap();
    assert_eq!(text.lines().count(), 3);

    let again = nami(&["simulate", "--config", path_str(&cfg)]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn simulate_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        scenario_file(dir.path(), "seed = 1\nreplications = 3\nmax_iter = 1\nmethods = [\"mi\"]\n[dgp]\nkind = \"m2\"\ntau_x = 0.0\n");
    let out = nami(&["simulate", "--config", path_str(&cfg)]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["failures_exceeded"], true);

    let cfg = scenario_file(dir.path(), "seed = 1\nreplication = 3\n[dgp]\nkind = \"m2\"\ntau_x = 0.0\n");
    assert_eq!(code(&nami(&["simulate", "--config", path_str(&cfg)])), 2);

    let cfg = scenario_file(dir.path(), "replications = 1\nmethods = [\"mi\"]\n[dgp]\nkind = \"m2\"\ntau_x = 0.0\nn = 40\n");
    let out = nami(&["simulate", "--config", path_str(&cfg)]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).starts_with("seed: "));
}
