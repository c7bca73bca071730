use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nsm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsm"))
        .args(args)
        .env_remove("NSM_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn assert_schema(name: &str, v: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{v:#}");
}

fn significant_digits(text: &str) -> usize {
    let mantissa = text.split(['e', 'E']).next().unwrap();
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    digits.trim_start_matches('0').trim_end_matches('0').len()
}

fn assert_twelve_digits(v: &Value) {
    match v {
        Value::Number(n) if n.is_f64() => assert!(significant_digits(&n.to_string()) <= 12, "{n}"),
        Value::Array(a) => a.iter().for_each(assert_twelve_digits),
        Value::Object(o) => o.values().for_each(assert_twelve_digits),
        _ => {}
    }
}

fn qubit_capacity(r: f64) -> f64 {
    let (a, b) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
    1.0 + a * a.log2() + b * b.log2()
}

#[test]
fn params_feasible_at_the_threshold_region() {
    let out = nsm(&["params", "--r", "0.77", "--nu", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_schema("params.schema.json", &v);
    assert_twelve_digits(&v);
    let c = v["capacity"].as_f64().unwrap();
    assert!((c - qubit_capacity(0.77)).abs() < 1e-11);
    assert!((c - 0.485).abs() < 1e-3 && c < 0.5);
    assert_eq!(v["gamma"].as_array().unwrap().len(), 10);
}

#[test]
fn params_infeasible_cases() {
    let out = nsm(&["params", "--r", "0.9", "--nu", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_schema("infeasible.schema.json", &v);
    assert_eq!(v["inequality"], "C_N·ν < 1/2");
    let load: f64 = v["detail"].as_str().unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    assert!((load - qubit_capacity(0.9)).abs() < 1e-11);

    let out = nsm(&["params", "--model", "identity", "--nu", "0.6"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["inequality"], "C_N·ν < 1/2");

    let out = nsm(&["params", "--model", "identity", "--nu", "0.4", "--delta", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["inequality"], "δ < 1/2 − C_N·ν");
}

#[test]
fn argument_errors_exit_one() {
    assert_eq!(nsm(&["params", "--r", "1.5"]).status.code(), Some(1));
    assert_eq!(nsm(&["bogus"]).status.code(), Some(1));
    assert_eq!(nsm(&["run", "--protocol", "ot", "--toy", "--n", "60"]).status.code(), Some(1));
    assert_eq!(nsm(&["--help"]).status.code(), Some(0));
}

#[derive(Debug, serde::Deserialize)]
struct CurveRow {
    nu: f64,
    r_threshold: f64,
    source: String,
}

#[derive(Debug, serde::Deserialize)]
struct LambdaRow {
    r: f64,
    lambda: f64,
    source: String,
}

fn read_csv<T: serde::de::DeserializeOwned>(path: &Path, header: &str) -> Vec<T> {
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().next(), Some(header));
    csv::Reader::from_path(path).unwrap().deserialize().map(|r| r.unwrap()).collect()
}

#[test]
fn curves_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = nsm(&["curves", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_schema("curves.schema.json", &json(&out));

    let region: Vec<CurveRow> = read_csv(&dir.path().join("security_region.csv"), "nu,r_threshold,source");
    let at_one = |src: &str| region.iter().find(|p| p.nu == 1.0 && p.source == src).unwrap().r_threshold;
    assert!((0.76..=0.79).contains(&at_one("depolarizing_d2")));
    assert!((0.76..=0.79).contains(&at_one("two_pauli")));
    assert!((0.60..=0.62).contains(&at_one("depolarizing_d3")));
    for p in &region {
        assert!(p.nu > 0.0 && p.nu <= 1.0 && (0.0..=1.0).contains(&p.r_threshold));
        assert!(significant_digits(&p.r_threshold.to_string()) <= 12);
    }

    let bsm: Vec<CurveRow> = read_csv(&dir.path().join("bsm_comparison.csv"), "nu,r_threshold,source");
    for p in bsm.iter().filter(|p| p.source == "bsm") {
        assert!((p.r_threshold - (1.0 / (4.0 * p.nu)).min(1.0)).abs() < 1e-11);
        let noisy = bsm.iter().find(|q| q.source == "depolarizing_d2" && q.nu == p.nu).unwrap();
        assert!(noisy.r_threshold >= p.r_threshold);
    }

    let lambda: Vec<LambdaRow> = read_csv(&dir.path().join("lambda_vs_r.csv"), "r,lambda,source");
    let qubit: Vec<&LambdaRow> = lambda.iter().filter(|p| p.source == "depolarizing_d2").collect();
    assert!(qubit.windows(2).all(|w| w[0].r < w[1].r && w[1].lambda <= w[0].lambda + 1e-12));
    assert!((qubit[0].lambda - 0.49).abs() < 1e-9);
    // capacity exceeds 1/2 beyond r ≈ 0.78, so λ has vanished by r = 1
    assert_eq!(qubit.last().unwrap().lambda, 0.0);
    assert!(qubit.iter().filter(|p| p.r > 0.78).all(|p| p.lambda == 0.0));
}

#[test]
fn honest_toy_ot_and_replay() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = nsm(&["run", "--protocol", "ot", "--toy", "--seed", "11", "--choice", "1", "--out-dir", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_schema("run.schema.json", &v);
        assert_eq!(v["outcome"]["ot_correct"], true);
        assert_eq!(v["outcome"]["frot_correct"], true);
        let c = v["outcome"]["c"].as_bool().unwrap();
        assert_eq!(v["outcome"]["y"], v["outcome"][if c { "s1" } else { "s0" }]);
    }
    for f in ["transcript.json", "outcome.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let t: Value = serde_json::from_slice(&std::fs::read(a.path().join("transcript.json")).unwrap()).unwrap();
    assert_schema("transcript.schema.json", &t);
    let types: Vec<&str> = t.as_array().unwrap().iter().map(|e| e["type"].as_str().unwrap()).collect();
    assert_eq!(&types[..4], ["QUBITS", "WAIT_BARRIER", "BASES", "PERMUTATION"]);
    assert_eq!(types.last(), Some(&"OT_MASKED"));
}

#[test]
fn seed_from_environment() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_nsm"))
        .args(["run", "--protocol", "wse", "--toy"])
        .env("NSM_SEED", "77")
        .output()
        .unwrap();
    let with_flag = nsm(&["run", "--protocol", "wse", "--toy", "--seed", "77"]);
    assert_eq!(with_env.stdout, with_flag.stdout);
    assert_ne!(with_flag.stdout, nsm(&["run", "--protocol", "wse", "--toy", "--seed", "78"]).stdout);
}

#[test]
fn dropped_message_fuzz() {
    for (protocol, extra) in [("wse", vec![]), ("commit", vec![]), ("ot", vec!["--n", "32", "--ell", "4"])] {
        let mut base = vec!["run", "--protocol", protocol, "--toy", "--seed", "5"];
        base.extend(&extra);
        let total = json(&nsm(&base))["message_count"].as_u64().unwrap() as usize;
        for idx in 0..total {
            let idx = idx.to_string();
            for flag in ["--drop", "--corrupt"] {
                let mut args = base.clone();
                args.extend([flag, &idx]);
                let out = nsm(&args);
                assert_eq!(out.status.code(), Some(0), "{protocol} {flag} {idx}");
                let v = json(&out);
                assert_schema("run.schema.json", &v);
                assert_eq!(v["substitutions"].as_array().unwrap().len(), 1, "{protocol} {flag} {idx}");
            }
        }
    }
}

#[test]
fn commit_run_accepts() {
    let out = nsm(&["run", "--protocol", "commit", "--toy", "--code", "rs:4:3:6", "--ell", "6", "--seed", "3"]);
    let v = json(&out);
    assert_schema("run.schema.json", &v);
    assert_eq!(v["outcome"]["accepted"], true);
    assert_eq!(v["outcome"]["c"], v["outcome"]["c_tilde"]);
    assert_eq!(v["outcome"]["y"], v["outcome"]["recovered_y"]);
    // outside toy mode the desk-scale commitment is infeasible
    assert_eq!(nsm(&["run", "--protocol", "commit"]).status.code(), Some(2));
}

#[test]
fn attack_reports() {
    let out = nsm(&["attack", "--kind", "wse", "--basis", "breidbart", "--n", "200", "--trials", "500"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_schema("attack.schema.json", &v);
    assert_twelve_digits(&v);
    let r = &v["reports"][0];
    let target = 0.5 + 0.5 / 2f64.sqrt();
    assert!(r["ci_low"].as_f64().unwrap() <= target && target <= r["ci_high"].as_f64().unwrap());

    let v = json(&nsm(&["attack", "--kind", "hiding", "--strategy", "noisy-store", "--r", "0", "--trials", "2000"]));
    assert_schema("attack.schema.json", &v);
    let r = &v["reports"][0];
    assert!(r["ci_low"].as_f64().unwrap() <= 0.0 && 0.0 <= r["ci_high"].as_f64().unwrap());
    assert_eq!(r["bound_vacuous"], true);

    let v = json(&nsm(&["attack", "--kind", "binding", "--dist", "8", "--trials", "20000"]));
    assert_schema("attack.schema.json", &v);
    let r = &v["reports"][0];
    let p = 2f64.powi(-8);
    assert!(r["ci_low"].as_f64().unwrap() <= p && p <= r["ci_high"].as_f64().unwrap());
    assert_eq!(v["syndrome_forced"], true);

    let out = nsm(&["attack", "--kind", "binding", "--code", "rs:5:3", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert_schema("infeasible.schema.json", &json(&out));
}

#[test]
fn verify_suite_passes() {
    let out = nsm(&["verify", "--trials", "5000", "--instances", "500"]);
    let v = json(&out);
    assert_schema("verify.schema.json", &v);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(v["passed"], true);
}
