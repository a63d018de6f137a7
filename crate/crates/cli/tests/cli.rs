use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn siglap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siglap")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ones = write(dir.path(), "k3.txt", "3\n0 1 1\n1 2 1\n0 2 1\n");
    let out = siglap(&["certify", &ones]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["lower"], 3.0);

    let signed = write(dir.path(), "k3s.txt", "3\n0 1 1\n1 2 -0.5\n0 2 -0.5\n");
    let out = siglap(&["certify", &signed, "--oracle"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["result"]["lower"], -1.5);
    assert_eq!(doc["result"]["oracle_eigenvalues"], serde_json::json!([-1.5, 1.5]));

    let bad = write(dir.path(), "bad.txt", "3\n0 1\n1 q\n");
    let out = siglap(&["certify", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let unweighted = write(dir.path(), "p3.txt", "3\n0 1\n1 2\n");
    assert_eq!(siglap(&["certify", &unweighted]).status.code(), Some(2));
    assert_eq!(siglap(&["certify", "/nonexistent/file"]).status.code(), Some(2));
}

#[test]
fn certificate_schema() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c4.txt", "4\n0 1 1\n1 2 1\n2 3 1\n0 3 1\n");
    let doc = json(&siglap(&["bounds", &f, "--oracle"]));
    for key in ["tool", "version", "command", "seed", "params", "result"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    let r = &doc["result"];
    let mut keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    let mut want = vec![
        "n", "e", "q", "p", "variance", "lambda2_g", "lambdaN_g", "mu", "mu_method", "lower", "upper",
        "positivity_paper", "positivity_naive", "improvement_ratio", "connected", "oracle_eigenvalues", "margins",
    ];
    want.sort_unstable();
    assert_eq!(keys, want);
    assert!((r["lower"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((r["upper"].as_f64().unwrap() - 4.0).abs() < 1e-9);
}

#[test]
fn mu_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write(dir.path(), "p3.txt", "3\n0 1\n1 2\n");
    let doc = json(&siglap(&["mu", &p3]));
    assert!((doc["result"]["mu"]["value"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert_eq!(doc["result"]["mu"]["method"], "projected_rayleigh");
    let out = siglap(&["mu", &p3, "--method", "closed"]);
    assert_eq!(out.status.code(), Some(2));

    let c6 = write(dir.path(), "c6.txt", "6\n0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n");
    let doc = json(&siglap(&["mu", &c6]));
    assert!((doc["result"]["mu"]["value"].as_f64().unwrap() - 5.0).abs() < 1e-9);
    let doc = json(&siglap(&["mu", &c6, "--method", "dmax"]));
    assert_eq!(doc["result"]["mu"]["value"], 6.0);
}

#[test]
fn experiment_examples() {
    let out = siglap(&["experiment", "--family", "cycle", "--n", "64", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let s = &json(&out)["result"]["summary"];
    assert!(s["improvement_ratio"]["max"].as_f64().unwrap() < 1.0);
    assert_eq!(s["sandwich_violations"], 0);
    assert_eq!(s["cycle_lambda_max"]["diverges"], true);

    let out = siglap(&["experiment", "--family", "complete", "--n", "8", "--trials", "100"]);
    assert_eq!(json(&out)["result"]["summary"]["sandwich_violations"], 0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("er.jsonl");
    let out = siglap(&[
        "experiment", "--family", "er_critical", "--n", "500", "--p0", "2", "--trials", "50", "--seed", "3",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(doc["result"].get("records").is_none());
    assert!(doc["result"]["summary"]["a_p0"].as_f64().unwrap() > 0.0);
    let lines: Vec<Value> = std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 50);
    for (i, rec) in lines.iter().enumerate() {
        assert_eq!(rec["trial"], i);
        assert!(rec["graph_stats"]["max_degree"].as_u64().unwrap() > 0);
        assert!(rec["spectral"]["lambda2_g"].is_number());
    }
}

#[test]
fn experiment_rejects_bad_params() {
    for args in [
        &["experiment", "--family", "er_critical", "--n", "100", "--p0", "0.5"][..],
        &["experiment", "--family", "random_regular", "--n", "5", "--d", "3"][..],
        &["experiment", "--family", "cycle"][..],
        &["experiment", "--kind", "lambda2", "--trials", "5", "--p", "0.5"][..],
        &["experiment", "--family", "complete", "--n", "5", "--weights", "poisson:2"][..],
    ] {
        assert_eq!(siglap(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn lambda2_ladder_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ladder.csv");
    let out = siglap(&[
        "experiment", "--kind", "lambda2", "--p", "0.5", "--ladder", "20,40", "--trials", "30",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "n,p,median_abs_dev,trials_used,disconnected");
    assert_eq!(rows.len(), 3);
}

#[test]
fn json_output_is_reproducible() {
    let args = ["experiment", "--family", "er_supercritical", "--n", "30", "--p", "0.3", "--trials", "20", "--seed", "9"];
    let a = siglap(&args);
    let b = siglap(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 9);
    let c = siglap(&["experiment", "--family", "er_supercritical", "--n", "30", "--p", "0.3", "--trials", "20", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn default_seed_is_zero() {
    let doc = json(&siglap(&["generate", "--family", "random_regular", "--n", "10", "--d", "3"]));
    assert_eq!(doc["seed"], 0);
    assert_eq!(doc["result"]["graph"]["regular_degree"], 3);
}

#[test]
fn generate_round_trips_through_certify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let p = path.to_str().unwrap();
    let out = siglap(&["generate", "--family", "complete", "--n", "6", "--weights", "gaussian:1,0.05", "--seed", "4", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    let out = siglap(&["certify", p, "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["result"]["n"], 6);
    assert_eq!(doc["result"]["e"], 15);
}

#[test]
fn spectrum_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c4.txt", "4\n0 1\n1 2\n2 3\n0 3\n");
    let doc = json(&siglap(&["spectrum", &f]));
    let ev: Vec<f64> = doc["result"]["laplacian_eigenvalues"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    for (got, want) in ev.iter().zip([0.0, 2.0, 2.0, 4.0]) {
        assert!((got - want).abs() < 1e-9);
    }
    let csv = siglap(&["--format", "csv", "spectrum", &f]);
    assert!(String::from_utf8_lossy(&csv.stdout).starts_with("index,equal_weight,weighted_restricted\n"));
    let text = siglap(&["--format", "text", "spectrum", &f]);
    assert!(String::from_utf8_lossy(&text.stdout).starts_with("siglap "));
}

#[test]
fn tightness_cli() {
    let doc = json(&siglap(&["tightness", "--n", "5", "--q", "1", "--p-moment", "1.2"]));
    assert!(doc["result"]["best_gap_lower"].as_f64().unwrap() <= 1e-6);
    assert_eq!(doc["params"]["iterations"], 2000);
}

#[test]
fn verify_suites() {
    for suite in ["identities", "duality"] {
        let out = siglap(&["verify", "--suite", suite]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        assert_eq!(json(&out)["result"]["passed"], true);
    }
    let out = siglap(&["--format", "text", "verify", "--suite", "sandwich", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("pass sandwich"));
    assert!(text.contains("failed 0"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(siglap(&[]).status.code(), Some(2));
    assert_eq!(siglap(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    assert_eq!(siglap(&["mu", "x", "--method", "fast"]).status.code(), Some(2));
}
