use super::smooth::{domain_gradient_integral, smooth_integral};
use super::{EvalOptions, EvalResult, Method, ValuationSpec};
use crate::convex::ConvexFunction;
use crate::error::{invalid, Result};
use crate::numerics::{flag_coefficient, map_indexed, mean_and_stderr, Estimate, Execution, RngStreams};
use crate::subspaces::{project_function, sample_grassmann};
use crate::weights::{alpha_from_zeta, xi_from_zeta};

/// Averages per-subspace estimates and scales by `coeff`.
pub(super) fn combine(samples: Vec<Result<Estimate>>, coeff: f64, method: Method) -> Result<EvalResult> {
    let samples: Vec<Estimate> = samples.into_iter().collect::<Result<_>>()?;
    let values: Vec<f64> = samples.iter().map(|e| e.value).collect();
    let errors: Vec<f64> = samples.iter().map(|e| e.error).collect();
    let (mean, se) = mean_and_stderr(&values);
    let quad = crate::numerics::pairwise_sum(&errors) / samples.len() as f64;
    let evals = samples.iter().map(|e| e.evaluations).sum();
    let res = EvalResult {
        value: mean,
        error: se.hypot(quad),
        sampling_error: se,
        quadrature_error: quad,
        method,
        integrand_evaluations: evals,
        subspace_samples: samples.len(),
    };
    Ok(res.scaled(coeff))
}

/// `Z_{j,ζ}(u) = flag(n, j) · E ∫_{dom proj_E u} α(|∇ proj_E u|)` over `E ∈ Gr(n, j)`.
pub fn eval_cauchy_kubota(spec: &ValuationSpec, u: &ConvexFunction, opts: &EvalOptions) -> Result<EvalResult> {
    let (j, n) = (spec.j, spec.n);
    if u.dim() != n {
        return invalid("dimension mismatch between function and valuation");
    }
    if opts.samples == 0 {
        return invalid("need at least one subspace sample");
    }
    if j == 0 {
        let mut r = EvalResult::exact(spec.j0_constant()?, Method::CauchyKubota);
        r.subspace_samples = 1;
        return Ok(r);
    }
    let alpha = alpha_from_zeta(&spec.zeta, j, n)?;
    let streams = RngStreams::new(opts.seed);
    let cfg = opts.quadrature;
    let samples = map_indexed(opts.samples, opts.execution, |i| {
        let mut rng = streams.stream(i as u64);
        let e = sample_grassmann(n, j, &mut rng)?;
        let w = project_function(u, &e)?.closed()?;
        domain_gradient_integral(&w, &alpha, &cfg)
    });
    combine(samples, flag_coefficient(n, j), Method::CauchyKubota)
}

/// Inner valuation on a `k`-dimensional projection.
fn inner_estimate(spec: &ValuationSpec, w: &ConvexFunction, opts: &EvalOptions) -> Result<Estimate> {
    if spec.j == 0 {
        return Ok(Estimate::exact(spec.j0_constant()?));
    }
    if spec.j == spec.n {
        return domain_gradient_integral(w, &spec.zeta, &opts.quadrature);
    }
    if w.is_twice_differentiable() && w.gradient_levels().is_some() {
        return smooth_integral(w, &spec.zeta, spec.n - spec.j, &opts.quadrature);
    }
    let r = eval_cauchy_kubota(spec, w, opts)?;
    Ok(Estimate { value: r.value, error: r.error, evaluations: r.integrand_evaluations, converged: r.error.is_finite() })
}

/// `Z_{j,ζ}(u) = flag(n, k) · E Z^k_{j,ξ}(proj_E u)` over `E ∈ Gr(n, k)`.
pub fn eval_ck_general(spec: &ValuationSpec, u: &ConvexFunction, k: usize, opts: &EvalOptions) -> Result<EvalResult> {
    let (j, n) = (spec.j, spec.n);
    if !(j <= k && k <= n) {
        return invalid(format!("need j <= k <= n, got j = {j}, k = {k}, n = {n}"));
    }
    if u.dim() != n {
        return invalid("dimension mismatch between function and valuation");
    }
    if opts.samples == 0 {
        return invalid("need at least one subspace sample");
    }
    if k == j {
        let mut r = eval_cauchy_kubota(spec, u, opts)?;
        r.method = Method::CauchyKubotaGeneral;
        return Ok(r);
    }
    let inner_spec = ValuationSpec::unchecked(j, k, xi_from_zeta(&spec.zeta, j, k, n)?);
    let streams = RngStreams::new(opts.seed);
    let samples = map_indexed(opts.samples, opts.execution, |i| {
        let mut rng = streams.stream(i as u64);
        let e = sample_grassmann(n, k, &mut rng)?;
        let w = project_function(u, &e)?.closed()?;
        let inner_opts = EvalOptions { seed: streams.derive(i as u64 + 1).seed(), execution: Execution::Sequential, ..*opts };
        inner_estimate(&inner_spec, &w, &inner_opts)
    });
    combine(samples, flag_coefficient(n, k), Method::CauchyKubotaGeneral)
}
