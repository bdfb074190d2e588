//! Evaluators for the functional intrinsic volumes `Z_{j,ζ}` and their duals.
//!
//! Several independent routes are provided so that they can be checked
//! against each other: direct quadrature for smooth functions, the
//! domain-gradient integral for `j = n`, Monte Carlo over Grassmannians
//! (Cauchy–Kubota), dual integrals and closed forms.

mod ck;
mod closed;
mod dual;
mod hessian;
mod smooth;

use serde::{Deserialize, Serialize};

use crate::convex::ConvexFunction;
use crate::error::{invalid, Result};
use crate::numerics::{Execution, QuadratureConfig};
use crate::weights::{alpha_from_zeta, HadClass, WeightFunction};

pub use ck::{eval_cauchy_kubota, eval_ck_general};
pub use closed::{Comparison, classical_ck_check, cone_closed_form, retrieval_check, retrieval_value};
pub use dual::{eval_dual, eval_dual_ck, DualPath};
pub use hessian::{conjugation_pushforward_check, hessian_measure_integral, reilly_radial_check, RadialProfile};
pub use smooth::{domain_gradient_integral, eval_domain_gradient, eval_smooth};

/// The valuation `Z_{j,ζ}` on convex functions on `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ValuationSpec {
    pub j: usize,
    pub n: usize,
    pub zeta: WeightFunction,
}

impl ValuationSpec {
    /// Validates `ζ ∈ Had_j^n`.
    pub fn new(j: usize, n: usize, zeta: WeightFunction) -> Result<Self> {
        if n == 0 || j > n {
            return invalid(format!("need 0 <= j <= n and n >= 1, got j = {j}, n = {n}"));
        }
        let m = HadClass::new(j, n).membership(&zeta)?;
        if !m.member {
            return invalid(format!("weight is not admissible for j = {j}, n = {n}: {}", m.reason));
        }
        Ok(Self { j, n, zeta })
    }

    /// Skips the admissibility check; used for derived weights on subspaces.
    pub(crate) fn unchecked(j: usize, n: usize, zeta: WeightFunction) -> Self {
        Self { j, n, zeta }
    }

    /// `Z_{0,ζ} = κ_n R^n ζ(0)`, constant on super-coercive functions.
    pub fn j0_constant(&self) -> Result<f64> {
        let a = alpha_from_zeta(&self.zeta, 0, self.n)?;
        a.limit_at_zero().ok_or_else(|| crate::Error::UnknownSingularity("R^n ζ has no limit at zero".into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Smooth,
    DomainGradient,
    CauchyKubota,
    CauchyKubotaGeneral,
    DualIntegral,
    DualConjugate,
    DualCauchyKubota,
    ClosedForm,
}

/// Value with a combined error estimate and work counters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    /// `sqrt(sampling² + quadrature²)`.
    pub error: f64,
    pub sampling_error: f64,
    pub quadrature_error: f64,
    pub method: Method,
    pub integrand_evaluations: u64,
    pub subspace_samples: usize,
}

impl EvalResult {
    pub(crate) fn exact(value: f64, method: Method) -> Self {
        Self { value, error: 0.0, sampling_error: 0.0, quadrature_error: 0.0, method, integrand_evaluations: 0, subspace_samples: 0 }
    }

    pub(crate) fn from_quadrature(value: f64, error: f64, evals: u64, method: Method) -> Self {
        Self { value, error, sampling_error: 0.0, quadrature_error: error, method, integrand_evaluations: evals, subspace_samples: 0 }
    }

    pub(crate) fn scaled(mut self, f: f64) -> Self {
        self.value *= f;
        self.error *= f.abs();
        self.sampling_error *= f.abs();
        self.quadrature_error *= f.abs();
        self
    }
}

/// Options shared by all evaluators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalOptions {
    pub quadrature: QuadratureConfig,
    pub samples: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { quadrature: QuadratureConfig::default(), samples: 256, seed: 0, execution: Execution::default() }
    }
}

impl EvalOptions {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// Picks the most direct route: closed form for `j = 0`, the domain-gradient
/// integral for `j = n`, quadrature for smooth functions and Cauchy–Kubota
/// averaging otherwise.
pub fn evaluate(spec: &ValuationSpec, u: &ConvexFunction, opts: &EvalOptions) -> Result<EvalResult> {
    if u.dim() != spec.n {
        return invalid(format!("function has dimension {}, valuation expects {}", u.dim(), spec.n));
    }
    if spec.j == 0 {
        return Ok(EvalResult::exact(spec.j0_constant()?, Method::ClosedForm));
    }
    if spec.j == spec.n {
        return eval_domain_gradient(spec, u, opts);
    }
    if u.is_twice_differentiable() && u.gradient_levels().is_some() {
        return eval_smooth(spec, u, opts);
    }
    eval_cauchy_kubota(spec, u, opts)
}
