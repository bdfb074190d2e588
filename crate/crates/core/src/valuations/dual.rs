use serde::{Deserialize, Serialize};

use super::ck::combine;
use super::{evaluate, EvalOptions, EvalResult, Method, ValuationSpec};
use crate::convex::ConvexFunction;
use crate::error::{invalid, unsupported, Result};
use crate::numerics::linalg::norm;
use crate::numerics::{flag_coefficient, integrate_ellipsoid, map_indexed, Estimate, QuadratureConfig, RngStreams, SymMatrix};
use crate::subspaces::{restrict_function, sample_grassmann};
use crate::weights::{xi_from_zeta, HadClass, WeightFunction};

/// Route for the dual valuation `Z*_{j,ζ}(v) = Z_{j,ζ}(v*)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualPath {
    /// `∫ ζ(|x|) [D²v]_j dx`.
    Integral,
    /// Conjugate first, then evaluate `Z_{j,ζ}(v*)`.
    Conjugate,
}

/// `∫_{|x| < s_max} ζ(|x|) [D²v(x)]_j dx`.
pub(crate) fn dual_integral(v: &ConvexFunction, zeta: &WeightFunction, j: usize, cfg: &QuadratureConfig) -> Result<Estimate> {
    let d = v.dim();
    if !v.is_finite_valued() || !v.is_twice_differentiable() {
        return unsupported("dual integral needs a finite, twice differentiable function");
    }
    let smax = zeta.s_max();
    let origin = vec![0.0; d];
    let f = |x: &[f64]| -> f64 {
        let s = norm(x);
        if s >= smax {
            return 0.0;
        }
        let w = if s == 0.0 { zeta.limit_at_zero().unwrap_or(0.0) } else { zeta.eval(s) };
        if w == 0.0 {
            return 0.0;
        }
        if j == 0 {
            return w;
        }
        match v.hessian(x) {
            Ok(h) => w * h.elem_sym(j),
            Err(_) => 0.0,
        }
    };
    integrate_ellipsoid(&f, &origin, &SymMatrix::identity(d), smax, zeta.breakpoints(), cfg)
}

/// The dual valuation `Z*_{j,ζ}(v)` along the chosen route.
pub fn eval_dual(spec: &ValuationSpec, v: &ConvexFunction, path: DualPath, opts: &EvalOptions) -> Result<EvalResult> {
    if v.dim() != spec.n {
        return invalid("dimension mismatch between function and valuation");
    }
    match path {
        DualPath::Integral => {
            let est = dual_integral(v, &spec.zeta, spec.j, &opts.quadrature)?.checked()?;
            Ok(EvalResult::from_quadrature(est.value, est.error, est.evaluations, Method::DualIntegral))
        }
        DualPath::Conjugate => {
            let u = v.conjugate()?;
            let mut r = evaluate(spec, &u, opts)?;
            r.method = Method::DualConjugate;
            Ok(r)
        }
    }
}

fn dual_inner(spec: &ValuationSpec, r: &ConvexFunction, opts: &EvalOptions) -> Result<Estimate> {
    if r.is_finite_valued() && r.is_twice_differentiable() {
        return dual_integral(r, &spec.zeta, spec.j, &opts.quadrature);
    }
    let res = evaluate(spec, &r.conjugate()?, opts)?;
    Ok(Estimate { value: res.value, error: res.error, evaluations: res.integrand_evaluations, converged: res.error.is_finite() })
}

/// `Z*_{j,ζ}(v) = flag(n, k) · E Z^{k,*}_{j,ξ}(v|_E)` over `E ∈ Gr(n, k)`; needs `ζ ∈ Had_k^n`.
pub fn eval_dual_ck(spec: &ValuationSpec, v: &ConvexFunction, k: usize, opts: &EvalOptions) -> Result<EvalResult> {
    let (j, n) = (spec.j, spec.n);
    if !(j <= k && k <= n) {
        return invalid(format!("need j <= k <= n, got j = {j}, k = {k}, n = {n}"));
    }
    if v.dim() != n {
        return invalid("dimension mismatch between function and valuation");
    }
    if opts.samples == 0 {
        return invalid("need at least one subspace sample");
    }
    let m = HadClass::new(k, n).membership(&spec.zeta)?;
    if !m.member {
        return invalid(format!("weight is not admissible for k = {k}, n = {n}: {}", m.reason));
    }
    let inner_spec = ValuationSpec::unchecked(j, k, xi_from_zeta(&spec.zeta, j, k, n)?);
    let streams = RngStreams::new(opts.seed);
    let samples = map_indexed(opts.samples, opts.execution, |i| {
        let mut rng = streams.stream(i as u64);
        let e = sample_grassmann(n, k, &mut rng)?;
        let r = restrict_function(v, &e)?;
        let inner_opts = EvalOptions { seed: streams.derive(i as u64 + 1).seed(), execution: crate::numerics::Execution::Sequential, ..*opts };
        dual_inner(&inner_spec, &r, &inner_opts)
    });
    combine(samples, flag_coefficient(n, k), Method::DualCauchyKubota)
}
