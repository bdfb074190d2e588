use serde::{Deserialize, Serialize};

use super::{evaluate, EvalOptions, EvalResult, ValuationSpec};
use crate::convex::{ConvexBody, ConvexFunction};
use crate::error::{invalid, Result};
use crate::numerics::{binom, kappa, map_indexed, mean_and_stderr, RngStreams};
use crate::subspaces::{project_body, sample_grassmann};
use crate::weights::transform_r_power;

/// Two sides of an identity, each with an error estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
}

impl Comparison {
    pub fn difference(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn error(&self) -> f64 {
        self.lhs_error.hypot(self.rhs_error)
    }
}

fn r_at(spec: &ValuationSpec, l: usize, t: f64) -> Result<f64> {
    let r = transform_r_power(&spec.zeta, l as u32);
    if t > 0.0 {
        Ok(r.eval(t))
    } else {
        r.limit_at_zero().ok_or_else(|| crate::Error::UnknownSingularity("transform has no limit at zero".into()))
    }
}

/// `Z_{j,ζ}(t|x| + I_{rB}) = κ_n binom(n, j) R^{n-j}ζ(t) r^j`.
pub fn cone_closed_form(spec: &ValuationSpec, t: f64, r: f64) -> Result<f64> {
    if t < 0.0 || r <= 0.0 {
        return invalid("cone needs t >= 0 and r > 0");
    }
    let (j, n) = (spec.j, spec.n);
    Ok(kappa(n) * binom(n, j) * r_at(spec, n - j, t)? * r.powi(j as i32))
}

/// `Z_{j,ζ}(I_K) = κ_{n-j} R^{n-j}ζ(0) V_j(K)`.
pub fn retrieval_value(spec: &ValuationSpec, body: &ConvexBody) -> Result<f64> {
    let (j, n) = (spec.j, spec.n);
    if body.dim() != n {
        return invalid("body dimension differs from the valuation");
    }
    Ok(kappa(n - j) * r_at(spec, n - j, 0.0)? * body.intrinsic_volume(j))
}

/// Evaluates `Z_{j,ζ}(I_K)` and compares with [`retrieval_value`].
pub fn retrieval_check(spec: &ValuationSpec, body: &ConvexBody, opts: &EvalOptions) -> Result<(EvalResult, Comparison)> {
    let res = evaluate(spec, &ConvexFunction::indicator(body.clone()), opts)?;
    let rhs = retrieval_value(spec, body)?;
    let cmp = Comparison { lhs: res.value, rhs, lhs_error: res.error, rhs_error: 0.0 };
    Ok((res, cmp))
}

/// Classical Cauchy–Kubota: `lhs = (κ_{n-j}/κ_{k-j}) binom(n-j, k-j) V_j(K)`
/// against the Monte Carlo `rhs = (κ_n/κ_k) binom(n, k) E V_j(proj_E K)`.
pub fn classical_ck_check(body: &ConvexBody, j: usize, k: usize, opts: &EvalOptions) -> Result<Comparison> {
    let n = body.dim();
    if !(j <= k && k <= n) {
        return invalid(format!("need j <= k <= n, got j = {j}, k = {k}, n = {n}"));
    }
    if opts.samples == 0 {
        return invalid("need at least one subspace sample");
    }
    let lhs = kappa(n - j) / kappa(k - j) * binom(n - j, k - j) * body.intrinsic_volume(j);
    let streams = RngStreams::new(opts.seed);
    let values = map_indexed(opts.samples, opts.execution, |i| {
        let mut rng = streams.stream(i as u64);
        let e = sample_grassmann(n, k, &mut rng)?;
        Ok(project_body(body, &e)?.intrinsic_volume(j))
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let (mean, se) = mean_and_stderr(&values);
    let c = kappa(n) / kappa(k) * binom(n, k);
    Ok(Comparison { lhs, rhs: c * mean, lhs_error: 0.0, rhs_error: c * se })
}
