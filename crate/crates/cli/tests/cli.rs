use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_momentumlab"));
    c.env_remove("MOMENTUMLAB_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("momentumlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn list_names_the_catalog() {
    let out = run(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for label in [
        "su2-spin-j",
        "abelian-triangle",
        "oscillator-truncation",
        "heisenberg-truncation",
        "fock-rotation-rkhs",
        "torus-poisson",
        "random-polytope-convex",
    ] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{label}\t"))), "{label}");
    }
    assert_eq!(text, String::from_utf8(run(&["list"]).stdout).unwrap());
}

#[test]
fn spin_two_from_config() {
    let cfg = temp("spin2.json");
    std::fs::write(&cfg, r#"{"scenario":"su2-spin-j","j":2,"seed":7}"#).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["seed"], 7);
    let hw = check(&r, "highest_weight");
    assert!(hw["residual"].as_f64().unwrap() <= 1e-10);
    for c in r["checks"].as_array().unwrap() {
        assert!(c["tolerance"].is_number() && c["residual"].is_number(), "{c}");
    }
}

#[test]
fn abelian_triangle() {
    let out = run(&["--scenario", "abelian-triangle", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(check(&r, "norm_law")["residual"].as_f64().unwrap() <= 1e-12);
    let mut verts: Vec<Vec<f64>> = r["momentum_set"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect())
        .collect();
    verts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(verts.len(), 3);
    let expected = [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]];
    for (v, e) in verts.iter().zip(expected) {
        assert!((v[0] - e[0]).abs() < 1e-9 && (v[1] - e[1]).abs() < 1e-9, "{verts:?}");
    }
}

#[test]
fn torus_ratio_table() {
    let cfg = temp("torus.json");
    std::fs::write(&cfg, r#"{"scenario":"torus-poisson","n_max":64}"#).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(check(&r, "ratio_constant")["residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(r["tables"][0]["rows"].as_array().unwrap().len(), 64);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["--scenario", "nope"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["--scenario", "torus-poisson", "--tol", "bogus=1"]).status.code(), Some(2));
    assert_eq!(run(&["--scenario", "torus-poisson", "--tol", "ratio_constant=-1"]).status.code(), Some(2));
    assert_eq!(run(&["--scenario", "torus-poisson", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["--scenario", "torus-poisson", "--samples", "0"]).status.code(), Some(2));
    let out = bin().args(["--scenario", "torus-poisson"]).env("MOMENTUMLAB_THREADS", "0").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_check_exits_one_with_record() {
    let out = run(&["--scenario", "torus-poisson", "--tol", "ratio_constant=1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    let line = err.lines().find(|l| l.starts_with("check-failed\t")).unwrap();
    let fields: Vec<&str> = line.split('\t').collect();
    assert_eq!(fields[1], "ratio_constant");
    assert!(fields[2].starts_with("residual=") && fields[3].starts_with("tolerance="));
    assert_eq!(json(&out)["failures"][0], "ratio_constant");
}

#[test]
fn flags_override_config_file() {
    let cfg = temp("override.json");
    std::fs::write(&cfg, r#"{"scenario":"su2-spin-j","j":1,"seed":7,"format":"json"}"#).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "--seed", "9", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x0,x1,x2,inner,outer,gap");
}

#[test]
fn csv_support_table_to_file() {
    let path = temp("spin.csv");
    let out = run(&["--scenario", "su2-spin-j", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["x0", "x1", "x2", "inner", "outer", "gap"]);
    let mut n = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let v: Vec<f64> = rec.iter().map(|s| s.parse().unwrap()).collect();
        assert!((v[5] - (v[4] - v[3])).abs() < 1e-12);
        assert!(v[5] >= -1e-12);
        n += 1;
    }
    assert!(n >= 6);
}

#[test]
fn reports_match_across_thread_counts() {
    let strip = |o: Output| {
        let s = String::from_utf8(o.stdout).unwrap();
        s[..s.find("\"timing\"").unwrap()].to_string()
    };
    let args = ["--scenario", "fock-rotation-rkhs", "--seed", "5"];
    let one = bin().args(args).env("MOMENTUMLAB_THREADS", "1").output().unwrap();
    let four = bin().args(args).env("MOMENTUMLAB_THREADS", "4").output().unwrap();
    let default = run(&args);
    let one = strip(one);
    assert_eq!(one, strip(four));
    assert_eq!(one, strip(default));
}
