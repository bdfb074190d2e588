//! Identity harness: runs cross-checks between independent evaluation routes
//! and aggregates them into pass/fail reports.

mod cases;
mod report;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::convex::{BodySpec, FunctionSpec};
use crate::error::{Error, Result};
use crate::numerics::{map_indexed, Execution};
use crate::valuations::RadialProfile;
use crate::weights::WeightSpec;

pub use report::{SuiteReport, Verdict, VerificationReport};

const DEFAULT_MANIFEST: &str = include_str!("default_manifest.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    CkFunctional,
    CkGeneral,
    CkClassical,
    Cone,
    Retrieval,
    RRoundtrip,
    RClosedForm,
    ReillyRadial,
    Duality,
    DualRestriction,
    ConjProjection,
    ValuationProperty,
    Invariance,
    Homogeneity,
    Nonnegativity,
    J0Constancy,
}

impl IdentityId {
    pub const ALL: [IdentityId; 16] = [
        IdentityId::CkFunctional,
        IdentityId::CkGeneral,
        IdentityId::CkClassical,
        IdentityId::Cone,
        IdentityId::Retrieval,
        IdentityId::RRoundtrip,
        IdentityId::RClosedForm,
        IdentityId::ReillyRadial,
        IdentityId::Duality,
        IdentityId::DualRestriction,
        IdentityId::ConjProjection,
        IdentityId::ValuationProperty,
        IdentityId::Invariance,
        IdentityId::Homogeneity,
        IdentityId::Nonnegativity,
        IdentityId::J0Constancy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityId::CkFunctional => "ck_functional",
            IdentityId::CkGeneral => "ck_general",
            IdentityId::CkClassical => "ck_classical",
            IdentityId::Cone => "cone",
            IdentityId::Retrieval => "retrieval",
            IdentityId::RRoundtrip => "r_roundtrip",
            IdentityId::RClosedForm => "r_closed_form",
            IdentityId::ReillyRadial => "reilly_radial",
            IdentityId::Duality => "duality",
            IdentityId::DualRestriction => "dual_restriction",
            IdentityId::ConjProjection => "conj_projection",
            IdentityId::ValuationProperty => "valuation_property",
            IdentityId::Invariance => "invariance",
            IdentityId::Homogeneity => "homogeneity",
            IdentityId::Nonnegativity => "nonnegativity",
            IdentityId::J0Constancy => "j0_constancy",
        }
    }
}

/// Pass iff `|lhs - rhs| <= max(absolute, relative·|rhs|, multiplier·error)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
    pub multiplier: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { absolute: 1e-8, relative: 0.0, multiplier: 3.0 }
    }
}

impl Tolerance {
    pub fn threshold(&self, rhs: f64, error: f64) -> f64 {
        self.absolute.max(self.relative * rhs.abs()).max(self.multiplier * error)
    }
}

/// One entry of a verification manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityCase {
    pub id: IdentityId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<WeightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_body: Option<BodySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<RadialProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_nonnegative: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerance: Tolerance,
}

impl IdentityCase {
    pub fn new(id: IdentityId) -> Self {
        Self {
            id,
            label: None,
            n: None,
            j: None,
            k: None,
            l: None,
            zeta: None,
            function: None,
            body: None,
            other_body: None,
            profile: None,
            t: None,
            r: None,
            lambda: None,
            expect_nonnegative: None,
            samples: None,
            seed: None,
            tolerance: Tolerance::default(),
        }
    }

    /// Checks the tolerance policy and that every embedded spec builds.
    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerance;
        if !(t.absolute >= 0.0 && t.relative >= 0.0 && t.multiplier >= 0.0) {
            return Err(Error::Schema(format!("{}: tolerances must be non-negative", self.id.name())));
        }
        let schema = |e: Error| Error::Schema(format!("{}: {e}", self.id.name()));
        if let Some(z) = &self.zeta {
            z.build().map_err(schema)?;
        }
        if let Some(f) = &self.function {
            f.build_with(self.n).map_err(schema)?;
        }
        for b in [&self.body, &self.other_body].into_iter().flatten() {
            b.build().map_err(schema)?;
        }
        if self.samples == Some(0) {
            return Err(Error::Schema(format!("{}: samples must be at least 1", self.id.name())));
        }
        Ok(())
    }
}

/// Suite-wide overrides.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    /// Replaces every case's sample count.
    pub samples: Option<usize>,
    /// Replaces every case's seed.
    pub seed: Option<u64>,
    pub execution: Execution,
}

pub fn parse_manifest(text: &str) -> Result<Vec<IdentityCase>> {
    let cases: Vec<IdentityCase> = serde_json::from_str(text).map_err(|e| Error::Schema(format!("manifest: {e}")))?;
    for c in &cases {
        c.validate()?;
    }
    Ok(cases)
}

/// The shipped manifest, covering every identity.
pub fn default_manifest() -> Vec<IdentityCase> {
    parse_manifest(DEFAULT_MANIFEST).expect("shipped manifest is valid")
}

pub fn run_case(case: &IdentityCase, opts: &SuiteOptions) -> Result<VerificationReport> {
    run_indexed(0, case, opts)
}

fn run_indexed(index: usize, case: &IdentityCase, opts: &SuiteOptions) -> Result<VerificationReport> {
    case.validate()?;
    let start = Instant::now();
    let outcome = cases::run(case, opts);
    let wall_time = start.elapsed().as_secs_f64();
    Ok(VerificationReport::from_outcome(index, case, outcome, wall_time))
}

/// Runs every case (no short-circuit); reports keep manifest order.
pub fn run_suite(cases: &[IdentityCase], opts: &SuiteOptions) -> Result<SuiteReport> {
    for c in cases {
        c.validate()?;
    }
    let start = Instant::now();
    let reports = map_indexed(cases.len(), opts.execution, |i| run_indexed(i, &cases[i], opts));
    let reports: Vec<VerificationReport> = reports.into_iter().collect::<Result<_>>()?;
    Ok(SuiteReport::new(reports, start.elapsed().as_secs_f64()))
}
