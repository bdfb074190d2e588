use super::{EvalOptions, EvalResult, Method, ValuationSpec};
use crate::convex::{ConvexBody, ConvexFunction};
use crate::error::{invalid, unsupported, Result};
use crate::numerics::linalg::norm;
use crate::numerics::{integrate_box, integrate_ellipsoid, kappa, BoxHints, Estimate, Quadric, QuadratureConfig};
use crate::weights::WeightFunction;

fn weight_at(w: &WeightFunction, s: f64) -> f64 {
    if s <= 0.0 {
        w.limit_at_zero().unwrap_or(0.0)
    } else {
        w.eval(s)
    }
}

/// `∫ w(|∇u|) [D²u]_degree dx` over the region where `|∇u| < s_max(w)`.
pub(crate) fn smooth_integral(u: &ConvexFunction, w: &WeightFunction, degree: usize, cfg: &QuadratureConfig) -> Result<Estimate> {
    let Some(levels) = u.gradient_levels() else {
        return unsupported("smooth evaluator needs a function with ellipsoidal gradient level sets");
    };
    if degree > 0 && !u.is_twice_differentiable() {
        return unsupported("smooth evaluator needs a twice differentiable function");
    }
    let smax = w.s_max();
    let radii: Vec<f64> = w.breakpoints().iter().map(|b| levels.radius(*b)).collect();
    let f = |x: &[f64]| -> f64 {
        let Ok(g) = u.gradient(x) else { return 0.0 };
        let s = norm(&g);
        if s >= smax {
            return 0.0;
        }
        let wv = weight_at(w, s);
        if wv == 0.0 {
            return 0.0;
        }
        if degree == 0 {
            return wv;
        }
        match u.hessian(x) {
            Ok(h) => wv * h.elem_sym(degree),
            Err(_) => 0.0,
        }
    };
    integrate_ellipsoid(&f, &levels.center, &levels.shape, levels.radius(smax), &radii, cfg)
}

/// `Z_{j,ζ}(u) = ∫ ζ(|∇u|) [D²u]_{n-j} dx` by direct quadrature.
pub fn eval_smooth(spec: &ValuationSpec, u: &ConvexFunction, opts: &EvalOptions) -> Result<EvalResult> {
    if u.dim() != spec.n {
        return invalid("dimension mismatch between function and valuation");
    }
    if !u.is_twice_differentiable() {
        return unsupported("smooth evaluator needs a twice differentiable function");
    }
    let est = smooth_integral(u, &spec.zeta, spec.n - spec.j, &opts.quadrature)?.checked()?;
    Ok(EvalResult::from_quadrature(est.value, est.error, est.evaluations, Method::Smooth))
}

/// `∫_{dom w} a(|∇w|) dx`, with closed forms for indicators and cones.
pub fn domain_gradient_integral(w: &ConvexFunction, a: &WeightFunction, cfg: &QuadratureConfig) -> Result<Estimate> {
    let d = w.dim();
    let at_zero = || a.limit_at_zero().ok_or_else(|| crate::Error::UnknownSingularity("weight has no limit at zero".into()));
    match w {
        ConvexFunction::Indicator(k) => Ok(Estimate::exact(at_zero()? * k.intrinsic_volume(d))),
        ConvexFunction::Cone { t, r, .. } => {
            let v = if *t == 0.0 { at_zero()? } else { a.eval(*t) };
            Ok(Estimate::exact(v * kappa(d) * r.powi(d as i32)))
        }
        ConvexFunction::EpiTranslated { inner, .. } | ConvexFunction::Rotated { inner, .. } => domain_gradient_integral(inner, a, cfg),
        ConvexFunction::EpiScaled { inner, lambda } => Ok(domain_gradient_integral(inner, a, cfg)?.scaled(lambda.powi(d as i32))),
        _ if w.gradient_levels().is_some() => smooth_integral(w, a, 0, cfg),
        ConvexFunction::MaxAffine { domain: Some(body), .. } if d <= 2 => {
            let (lo, hi) = body.bounding_box();
            let f = |x: &[f64]| -> f64 {
                if !body.contains(x, 0.0) {
                    return 0.0;
                }
                match w.gradient(x) {
                    Ok(g) => {
                        let s = norm(&g);
                        if s == 0.0 { a.limit_at_zero().unwrap_or(0.0) } else { a.eval(s) }
                    }
                    Err(_) => 0.0,
                }
            };
            let hints = match body {
                ConvexBody::Ball { center, radius } => BoxHints {
                    quadrics: vec![Quadric { center: center.clone(), shape: crate::numerics::SymMatrix::identity(d), radii: vec![*radius] }],
                    singular_point: None,
                },
                _ => BoxHints::default(),
            };
            Ok(integrate_box(&f, &lo, &hi, &hints, cfg))
        }
        _ => unsupported("domain-gradient integral for this variant"),
    }
}

/// `Z_{n,ζ}(u) = ∫_{dom u} ζ(|∇u|) dx`.
pub fn eval_domain_gradient(spec: &ValuationSpec, u: &ConvexFunction, opts: &EvalOptions) -> Result<EvalResult> {
    if spec.j != spec.n {
        return invalid("the domain-gradient integral computes Z_n only");
    }
    if u.dim() != spec.n {
        return invalid("dimension mismatch between function and valuation");
    }
    let est = domain_gradient_integral(u, &spec.zeta, &opts.quadrature)?.checked()?;
    Ok(EvalResult::from_quadrature(est.value, est.error, est.evaluations, Method::DomainGradient))
}
