use std::collections::HashSet;
use std::f64::consts::PI;

use funvol::numerics::Execution;
use funvol::verify::*;
use funvol::weights::WeightSpec;

fn sequential() -> SuiteOptions {
    SuiteOptions { execution: Execution::Sequential, ..SuiteOptions::default() }
}

fn tent() -> WeightSpec {
    WeightSpec::Tent { s0: 1.0 }
}

#[test]
fn default_manifest_covers_every_identity() {
    let ids: HashSet<IdentityId> = default_manifest().iter().map(|c| c.id).collect();
    for id in IdentityId::ALL {
        assert!(ids.contains(&id), "missing {}", id.name());
    }
}

#[test]
fn cone_case_passes_near_three_quarter_pi() {
    let mut c = IdentityCase::new(IdentityId::Cone);
    c.n = Some(2);
    c.j = Some(1);
    c.zeta = Some(tent());
    c.t = Some(0.5);
    c.samples = Some(16);
    let r = run_case(&c, &sequential()).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(r.difference <= 1e-6);
    assert!((r.rhs - 0.75 * PI).abs() < 1e-12);
}

#[test]
fn roundtrip_case_passes() {
    let mut c = IdentityCase::new(IdentityId::RRoundtrip);
    c.zeta = Some(tent());
    c.l = Some(2);
    c.tolerance = Tolerance { absolute: 1e-7, relative: 0.0, multiplier: 0.0 };
    assert!(run_case(&c, &sequential()).unwrap().passed());
}

#[test]
fn single_sample_is_not_a_pass() {
    let text = r#"[{"id": "ck_functional", "n": 3, "j": 1, "samples": 1,
        "zeta": {"type": "tent", "s0": 1.0},
        "function": {"type": "quadratic", "A": [[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 0.5]]},
        "tolerance": {"absolute": 0.0, "relative": 0.0, "multiplier": 3.0}}]"#;
    let cases = parse_manifest(text).unwrap();
    let r = run_case(&cases[0], &sequential()).unwrap();
    assert_ne!(r.verdict, Verdict::Pass);
    assert!(r.verdict == Verdict::NonConverged || r.error > 1.0);
}

#[test]
fn empty_manifest_passes() {
    let report = run_suite(&parse_manifest("[]").unwrap(), &sequential()).unwrap();
    assert!(report.all_pass && report.cases.is_empty());
}

#[test]
fn zero_tolerance_fails_the_suite() {
    let text = r#"[
        {"id": "r_closed_form", "l": -1, "zeta": {"type": "tent", "s0": 1.0}, "tolerance": {"absolute": 1e-7}},
        {"id": "ck_classical", "j": 2, "k": 2, "samples": 200, "body": {"type": "box", "intervals": [[0,1],[0,1],[0,1]]},
         "tolerance": {"absolute": 0.0, "relative": 0.0, "multiplier": 0.0}}
    ]"#;
    let report = run_suite(&parse_manifest(text).unwrap(), &sequential()).unwrap();
    assert_eq!(report.cases.len(), 2);
    assert!(report.cases[0].passed());
    assert_eq!(report.cases[1].verdict, Verdict::Fail);
    assert!(!report.all_pass);
}

#[test]
fn malformed_manifests_are_schema_errors() {
    for text in [
        "{",
        r#"[{"id": "no_such_identity"}]"#,
        r#"[{"id": "cone", "zeta": {"type": "tent", "s0": -1.0}}]"#,
        r#"[{"id": "cone", "bogus": 1}]"#,
        r#"[{"id": "cone", "tolerance": {"absolute": -1.0}}]"#,
    ] {
        assert!(matches!(parse_manifest(text), Err(funvol::Error::Schema(_))), "{text}");
    }
}

#[test]
fn missing_fields_fail_with_message() {
    let c = IdentityCase::new(IdentityId::Cone);
    let r = run_case(&c, &sequential()).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.message.unwrap().contains("missing"));
}

#[test]
fn reports_are_deterministic_and_thread_independent() {
    let cases: Vec<IdentityCase> = default_manifest()
        .into_iter()
        .filter(|c| matches!(c.id, IdentityId::CkClassical | IdentityId::Retrieval | IdentityId::ValuationProperty | IdentityId::Invariance))
        .collect();
    let a = run_suite(&cases, &sequential()).unwrap().without_timing();
    let b = run_suite(&cases, &sequential()).unwrap().without_timing();
    let p = run_suite(&cases, &SuiteOptions::default()).unwrap().without_timing();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    assert_eq!(a.to_json().unwrap(), p.to_json().unwrap());
    assert_eq!(a.to_csv(), p.to_csv());
}

#[test]
fn seed_override_changes_monte_carlo_cases() {
    let cases: Vec<IdentityCase> = default_manifest().into_iter().filter(|c| c.label.as_deref() == Some("cube_v2")).collect();
    let a = run_suite(&cases, &sequential()).unwrap();
    let b = run_suite(&cases, &SuiteOptions { seed: Some(7), ..sequential() }).unwrap();
    assert_ne!(a.cases[0].rhs, b.cases[0].rhs);
    assert!(a.all_pass && b.all_pass);
}

#[test]
fn csv_has_one_row_per_case() {
    let cases: Vec<IdentityCase> = default_manifest().into_iter().filter(|c| c.id == IdentityId::RClosedForm).collect();
    let csv = run_suite(&cases, &sequential()).unwrap().to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "case,id,lhs,rhs,difference,error,verdict");
    assert_eq!(lines.len(), cases.len() + 1);
    assert!(lines[1..].iter().all(|l| l.ends_with(",pass")));
}
