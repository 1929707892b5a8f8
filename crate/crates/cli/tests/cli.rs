use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nefdual")).args(args).output().expect("spawn nefdual")
}

fn run_json(args: &[&str], path: &Path) -> (Output, Value) {
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    all.extend(["--json", p]);
    let out = run(&all);
    let v = serde_json::from_slice(&std::fs::read(path).expect("report written")).expect("valid JSON");
    (out, v)
}

fn result<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["results"].as_array().unwrap().iter().find(|r| r["name"] == name).unwrap_or_else(|| panic!("{name}"))
}

#[test]
fn dual_check_poisson_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (out, v) = run_json(&["dual", "check", "poisson"], &dir.path().join("r.json"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["schema_version"], 1);
    let r = result(&v, "duality");
    assert_eq!(r["pass"], true);
    assert!(r["residual"].as_f64().unwrap() <= r["tolerance"].as_f64().unwrap());
    assert_eq!(v["config"]["grid"], 50);
}

#[test]
fn derive_reproduces_landau_dual() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["dual", "derive", "--variance", "m", "--domain", "0:inf", "--anchor", "1,0,-1"];
    let (out, v) = run_json(&args, &dir.path().join("r.json"));
    assert_eq!(out.status.code(), Some(0));
    for sample in v["data"]["samples"].as_array().unwrap() {
        let m = sample["m"].as_f64().unwrap();
        let got = sample["ell_star"].as_f64().unwrap();
        assert!((got - (m * m.ln() - m)).abs() < 1e-9 * m.max(1.0), "m = {m}: {got}");
    }
}

#[test]
fn syntax_errors_exit_2_with_grammar() {
    let out = run(&["dual", "derive", "--variance", "m +* 1", "--domain", "0:1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("byte 3"), "{err}");
    assert!(err.contains("primary :="), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["ldp", "mc", "gaussian", "--m", "1", "--n", "10"]).status.code(), Some(2));
    assert_eq!(run(&["dual", "certify", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["catalog", "show", "no_such_family"]).status.code(), Some(2));
    assert_eq!(run(&["ldp", "binom", "--m", "2", "--n-list", "10"]).status.code(), Some(2));
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (out, v) = run_json(&["dual", "certify", "h2"], &dir.path().join("h2.json"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["certificates"][0]["outcome"]["outcome"], "certificate");
    assert!(v["certificates"][0]["outcome"]["value"].as_f64().unwrap() < 0.0);

    // the negative binomial witness has a positive determinant, so no certificate results
    let (out, v) = run_json(&["dual", "certify", "mnegbin"], &dir.path().join("nb.json"));
    assert_eq!(out.status.code(), Some(1));
    let det = v["data"]["determinant"].as_f64().unwrap();
    assert!((det - 177_769.0 / 345_600_000.0).abs() < 1e-15);
    assert!(v["data"]["quoted_determinant"].as_f64().unwrap() < 0.0);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let args = ["ldp", "mc", "bilateral_exponential", "--m", "0.2", "--n", "50", "--trials", "50000", "--seed", "11"];
    let (_, _) = run_json(&args, &p);
    let first = std::fs::read(&p).unwrap();
    let (_, _) = run_json(&args, &p);
    assert_eq!(first, std::fs::read(&p).unwrap());
}

#[test]
fn floats_carry_17_digits() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    run_json(&["dilog", "sigma", "--n", "2"], &p);
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.contains("1.1750993033090"), "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    let atom = result(&v, "atom_at_zero")["value"].as_f64().unwrap();
    assert!((atom - 0.11751).abs() < 1e-4);
}

#[test]
fn csv_tables_have_headers() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.csv");
    let out = run(&["dilog", "pmf", "--n", "3", "--csv", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&p).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["n", "weight"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    let w0: f64 = rows[0][1].parse().unwrap();
    assert!((w0 - (-PI2 / 6.0).exp()).abs() < 1e-15);

    run(&["ldp", "binom", "--m", "0.5", "--n-list", "10,20", "--csv", p.to_str().unwrap()]);
    let mut rdr = csv::Reader::from_path(&p).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["n", "exact", "mc", "stderr", "limit"]);
}

const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

#[test]
fn every_judged_result_carries_its_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    for (i, args) in [
        vec!["levy", "verify", "all"],
        vec!["multivar", "multinomial", "--n", "2", "--count", "5"],
        vec!["dilog", "convcheck", "--n", "30"],
        vec!["ldp", "rate", "poisson", "--m0", "1", "--m", "2"],
    ]
    .iter()
    .enumerate()
    {
        let (out, v) = run_json(args, &dir.path().join(format!("{i}.json")));
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        for r in v["results"].as_array().unwrap() {
            if let Some(pass) = r["pass"].as_bool() {
                if let (Some(res), Some(tol)) = (r["residual"].as_f64(), r["tolerance"].as_f64()) {
                    assert_eq!(pass, res <= tol, "{r}");
                }
            }
        }
    }
}
