use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::cases::Outcome;
use super::IdentityCase;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NonConverged,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NonConverged => "non_converged",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub index: usize,
    pub case: IdentityCase,
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
    pub error: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub integrand_evaluations: u64,
    pub subspace_samples: usize,
    pub wall_time: f64,
}

impl VerificationReport {
    pub(crate) fn from_outcome(index: usize, case: &IdentityCase, outcome: Result<Outcome>, wall_time: f64) -> Self {
        let mut r = Self {
            index,
            case: case.clone(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            difference: f64::NAN,
            error: f64::NAN,
            threshold: f64::NAN,
            verdict: Verdict::Fail,
            message: None,
            integrand_evaluations: 0,
            subspace_samples: 0,
            wall_time,
        };
        match outcome {
            Ok(o) => {
                r.lhs = o.lhs;
                r.rhs = o.rhs;
                r.difference = (o.lhs - o.rhs).abs();
                r.error = o.error;
                r.integrand_evaluations = o.evaluations;
                r.subspace_samples = o.samples;
                r.message = o.message;
                r.threshold = case.tolerance.threshold(o.rhs, o.error);
                r.verdict = if !o.error.is_finite() || !o.lhs.is_finite() || !o.rhs.is_finite() {
                    Verdict::NonConverged
                } else if r.difference <= r.threshold {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
            }
            Err(Error::NonConverged { estimate, error_estimate }) => {
                r.verdict = Verdict::NonConverged;
                r.lhs = estimate;
                r.error = error_estimate;
                r.message = Some("quadrature did not converge".into());
            }
            Err(e) => r.message = Some(e.to_string()),
        }
        r
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn name(&self) -> String {
        match &self.case.label {
            Some(l) => format!("{}:{l}", self.case.id.name()),
            None => self.case.id.name().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub cases: Vec<VerificationReport>,
    pub passed: usize,
    pub failed: usize,
    pub non_converged: usize,
    pub all_pass: bool,
    pub wall_time: f64,
}

impl SuiteReport {
    pub(crate) fn new(cases: Vec<VerificationReport>, wall_time: f64) -> Self {
        let count = |v: Verdict| cases.iter().filter(|c| c.verdict == v).count();
        let (passed, failed, non_converged) = (count(Verdict::Pass), count(Verdict::Fail), count(Verdict::NonConverged));
        Self { all_pass: passed == cases.len(), passed, failed, non_converged, cases, wall_time }
    }

    /// Timing fields zeroed, for byte-level comparison of runs.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.wall_time = 0.0;
        for c in &mut r.cases {
            c.wall_time = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> Result<String> {
        let v = serde_json::to_value(self).map_err(|e| Error::Schema(e.to_string()))?;
        serde_json::to_string_pretty(&v).map_err(|e| Error::Schema(e.to_string()))
    }

    /// `case,id,lhs,rhs,difference,error,verdict`, one row per case.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("case,id,lhs,rhs,difference,error,verdict\n");
        for c in &self.cases {
            let _ = writeln!(
                out,
                "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                c.index,
                c.name(),
                c.lhs,
                c.rhs,
                c.difference,
                c.error,
                c.verdict.name()
            );
        }
        out
    }
}
