use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Scratch(TempDir);

impl Scratch {
    fn new() -> Self {
        Scratch(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

fn funvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_funvol")).args(args).env_remove("FUNVOL_THREADS").output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn csv_rows(out: &Output) -> Vec<Vec<f64>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

const TENT: &str = r#"{"type":"tent","s0":1}"#;

#[test]
fn compute_smooth_half_square() {
    let s = Scratch::new();
    let (u, z) = (s.file("u.json", r#"{"type":"quadratic","A":[[1,0],[0,1]]}"#), s.file("z.json", TENT));
    let out = funvol(&["compute", "--function", u.to_str().unwrap(), "--zeta", z.to_str().unwrap(), "--j", "1", "--method", "smooth"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["value"].as_f64().unwrap() - 2.0 * PI / 3.0).abs() < 1e-9);
    assert!(v["error"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["method"], "smooth");
    assert!(v["counters"]["integrand_evaluations"].as_u64().unwrap() > 0);
}

#[test]
fn compute_cone_by_cauchy_kubota() {
    let s = Scratch::new();
    let (u, z) = (s.file("u.json", r#"{"type":"cone","t":0.5,"r":1}"#), s.file("z.json", TENT));
    let out = funvol(&["compute", "--function", u.to_str().unwrap(), "--n", "2", "--zeta", z.to_str().unwrap(), "--j", "1", "--method", "ck"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((stdout_json(&out)["value"].as_f64().unwrap() - 0.75 * PI).abs() < 1e-6);
}

#[test]
fn compute_ball_domain_gradient() {
    let s = Scratch::new();
    let u = s.file("u.json", r#"{"type":"indicator","body":{"type":"ball","r":1,"center":[0,0]}}"#);
    let z = s.file("z.json", TENT);
    let out = funvol(&["compute", "--function", u.to_str().unwrap(), "--zeta", z.to_str().unwrap(), "--j", "2", "--method", "domain-gradient"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((stdout_json(&out)["value"].as_f64().unwrap() - PI).abs() < 1e-12);
}

#[test]
fn compute_is_byte_stable() {
    let s = Scratch::new();
    let u = s.file("u.json", r#"{"type":"quadratic","A":[[1,0.2,0],[0.2,2,0],[0,0,4]]}"#);
    let z = s.file("z.json", TENT);
    let args = ["compute", "--function", u.to_str().unwrap(), "--zeta", z.to_str().unwrap(), "--j", "1", "--k", "2", "--method", "ck-general", "--samples", "8", "--seed", "5"];
    let a = funvol(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_funvol")).args(args).env("FUNVOL_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn compute_exit_codes() {
    let s = Scratch::new();
    let z = s.file("z.json", TENT);
    let cone = s.file("cone.json", r#"{"type":"cone","t":0.5,"r":1,"n":2}"#);
    let out = funvol(&["compute", "--function", cone.to_str().unwrap(), "--zeta", z.to_str().unwrap(), "--j", "1", "--method", "smooth"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout_json(&out)["error"]["kind"], "unsupported_variant");

    let bad = s.file("bad.json", r#"{"type":"cone","t":0.5}"#);
    let out = funvol(&["compute", "--function", bad.to_str().unwrap(), "--zeta", z.to_str().unwrap(), "--j", "1", "--method", "ck"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"]["kind"], "schema");

    let q = s.file("q.json", r#"{"type":"quadratic","A":[[1]]}"#);
    let out = funvol(&[
        "compute", "--function", q.to_str().unwrap(), "--zeta", z.to_str().unwrap(), "--j", "1", "--method", "smooth", "--abs-tol", "1e-300", "--rel-tol", "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stdout_json(&out)["error"]["kind"], "non_converged");

    let out = funvol(&["compute", "--function", q.to_str().unwrap(), "--zeta", z.to_str().unwrap(), "--j", "1", "--method", "smooth", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_thread_count_is_schema_error() {
    let s = Scratch::new();
    let z = s.file("z.json", TENT);
    let out = Command::new(env!("CARGO_BIN_EXE_funvol"))
        .args(["transform", "--zeta", z.to_str().unwrap(), "--power", "1", "--grid", "0.5:0.5:1"])
        .env("FUNVOL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn transform_rows() {
    let s = Scratch::new();
    let z = s.file("z.json", TENT);
    let out = funvol(&["transform", "--zeta", z.to_str().unwrap(), "--power", "1", "--grid", "0.5:0.5:1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("s,R^1 zeta\n"));
    assert_eq!(csv_rows(&out), vec![vec![0.5, 0.375]]);

    let out = funvol(&["transform", "--zeta", z.to_str().unwrap(), "--power", "1", "--inverse", "--grid", "0.1:0.1:1"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("s,R^-1 zeta\n"));
    assert!((csv_rows(&out)[0][1] + 0.1f64.ln()).abs() < 1e-12);
}

#[test]
fn transform_power_zero_echoes() {
    let s = Scratch::new();
    let z = s.file("z.json", r#"{"type":"bump","a":0.2,"b":0.8}"#);
    let out = funvol(&["transform", "--zeta", z.to_str().unwrap(), "--power", "0", "--grid", "0.05:1.2:24:log"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 24);
    for r in rows {
        let s = r[0];
        let x = (2.0 * s - 1.0) / 0.6;
        let expect = if x.abs() < 1.0 { (1.0 - 1.0 / (1.0 - x * x)).exp() } else { 0.0 };
        assert!((r[1] - expect).abs() <= 1e-10 * expect, "{s}: {} vs {expect}", r[1]);
    }
}

#[test]
fn transform_rejects_nonpositive_grid() {
    let s = Scratch::new();
    let z = s.file("z.json", TENT);
    let out = funvol(&["transform", "--zeta", z.to_str().unwrap(), "--power", "1", "--grid", "0:1:5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn conjugate_specs() {
    let s = Scratch::new();
    let ball = s.file("b.json", r#"{"type":"indicator","body":{"type":"ball","r":1,"center":[0,0]}}"#);
    let out = funvol(&["conjugate", "--function", ball.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["type"], "support");
    assert_eq!(v["body"]["type"], "ball");

    let q = s.file("q.json", r#"{"type":"quadratic","A":[[1,0],[0,1]]}"#);
    let v = stdout_json(&funvol(&["conjugate", "--function", q.to_str().unwrap()]));
    assert_eq!(v["A"], serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));

    let cone = s.file("c.json", r#"{"type":"cone","t":0.5,"r":1,"n":2}"#);
    let out = funvol(&["conjugate", "--function", cone.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let back = s.file("back.json", &text);
    let twice = funvol(&["conjugate", "--function", back.to_str().unwrap()]);
    assert_eq!(stdout_json(&twice), serde_json::from_str::<Value>(r#"{"type":"cone","t":0.5,"r":1.0,"n":2}"#).unwrap());
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["type"], "radial_max_affine");
}

#[test]
fn emitted_specs_are_canonical() {
    let s = Scratch::new();
    let u = s.file("u.json", r#"{"type":"epi_translate","x0":[1,0],"alpha":2,"inner":{"type":"quadratic","A":[[2,0],[0,1]]}}"#);
    let first = funvol(&["conjugate", "--function", u.to_str().unwrap()]);
    let text = String::from_utf8(first.stdout.clone()).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(format!("{v}\n"), text);
    let again = s.file("again.json", &text);
    let round = funvol(&["conjugate", "--function", again.to_str().unwrap()]);
    let inner = s.file("inner.json", &String::from_utf8(round.stdout).unwrap());
    let thrice = funvol(&["conjugate", "--function", inner.to_str().unwrap()]);
    assert_eq!(thrice.stdout, first.stdout);
}

#[test]
fn conjugate_numeric_matches_analytic() {
    let s = Scratch::new();
    let q = s.file("q.json", r#"{"type":"quadratic","A":[[2,0.5],[0.5,1]],"b":[0.1,0]}"#);
    let out = funvol(&["conjugate", "--function", q.to_str().unwrap(), "--numeric", "--grid=-1:1:5", "--primal-grid=-4:4:401", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["points"].as_array().unwrap().len(), 25);
    assert!(v["max_deviation"].as_f64().unwrap() < 1e-3);
}

fn cone_manifest() -> &'static str {
    r#"[{"id":"cone","n":2,"j":1,"zeta":{"type":"tent","s0":1},"t":0.5,"r":1,"samples":64}]"#
}

#[test]
fn verify_cone_manifest_csv() {
    let s = Scratch::new();
    let m = s.file("m.json", cone_manifest());
    let out = funvol(&["verify", "--manifest", m.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let (lhs, rhs): (f64, f64) = (row[2].parse().unwrap(), row[3].parse().unwrap());
    assert!((lhs - 0.75 * PI).abs() < 1e-6 && (rhs - 0.75 * PI).abs() < 1e-12);
    assert_eq!(row[6], "pass");
}

#[test]
fn verify_writes_report_file() {
    let s = Scratch::new();
    let m = s.file("m.json", cone_manifest());
    let path = s.0.path().join("report.json");
    let out = funvol(&["verify", "--manifest", m.to_str().unwrap(), "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let file: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(file["cases"][0]["verdict"], "pass");
    assert_eq!(stdout_json(&out)["wall_time"], 0.0);
}

#[test]
fn verify_failure_and_schema_codes() {
    let s = Scratch::new();
    let failing = s.file(
        "f.json",
        r#"[{"id":"ck_functional","n":2,"j":1,"zeta":{"type":"tent","s0":1},"function":{"type":"quadratic","A":[[1,0],[0,2]]},"samples":4,"tolerance":{"absolute":0,"relative":0,"multiplier":0}}]"#,
    );
    let out = funvol(&["verify", "--manifest", failing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["all_pass"], false);

    let bad = s.file("bad.json", r#"[{"id":"cone","n":2,"j":1,"bogus":true}]"#);
    let out = funvol(&["verify", "--manifest", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["error"]["kind"], "schema");

    let empty = s.file("empty.json", "[]");
    let out = funvol(&["verify", "--manifest", empty.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_default_suite_passes() {
    let out = funvol(&["verify", "--default-suite", "--seed", "7", "--format", "csv"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")));
}
