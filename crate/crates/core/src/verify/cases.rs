use rand::Rng;

use super::{IdentityCase, IdentityId, SuiteOptions};
use crate::convex::{ConvexBody, ConvexFunction};
use crate::error::{unsupported, Error, Result};
use crate::numerics::{integrate_pieces, kappa, log_grid, Endpoints, QuadratureConfig, RngStreams};
use crate::subspaces::{check_conjugate_projection, sample_grassmann, sample_rotation};
use crate::valuations::{
    classical_ck_check, cone_closed_form, eval_cauchy_kubota, eval_ck_general, eval_dual, eval_dual_ck, eval_smooth, evaluate,
    reilly_radial_check, retrieval_check, retrieval_value, DualPath, EvalOptions, EvalResult, RadialProfile, ValuationSpec,
};
use crate::weights::{nonnegativity_check, transform_r_inverse, transform_r_power, WeightFunction, WeightKind};

/// Both sides of a checked identity.
pub(crate) struct Outcome {
    pub lhs: f64,
    pub rhs: f64,
    pub error: f64,
    pub evaluations: u64,
    pub samples: usize,
    pub message: Option<String>,
}

impl Outcome {
    fn exact(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, error: 0.0, evaluations: 0, samples: 0, message: None }
    }

    fn pair(lhs: &EvalResult, rhs: &EvalResult) -> Self {
        Self {
            lhs: lhs.value,
            rhs: rhs.value,
            error: lhs.error.hypot(rhs.error),
            evaluations: lhs.integrand_evaluations + rhs.integrand_evaluations,
            samples: lhs.subspace_samples + rhs.subspace_samples,
            message: None,
        }
    }
}

fn missing(case: &IdentityCase, field: &str) -> Error {
    Error::Schema(format!("{}: missing field `{field}`", case.id.name()))
}

struct Ctx<'a> {
    case: &'a IdentityCase,
    opts: EvalOptions,
}

impl Ctx<'_> {
    fn n(&self) -> Result<usize> {
        self.case.n.ok_or_else(|| missing(self.case, "n"))
    }

    fn j(&self) -> Result<usize> {
        self.case.j.ok_or_else(|| missing(self.case, "j"))
    }

    fn k(&self) -> Result<usize> {
        self.case.k.ok_or_else(|| missing(self.case, "k"))
    }

    fn zeta(&self) -> Result<WeightFunction> {
        self.case.zeta.as_ref().ok_or_else(|| missing(self.case, "zeta"))?.build()
    }

    fn function(&self) -> Result<ConvexFunction> {
        self.case.function.as_ref().ok_or_else(|| missing(self.case, "function"))?.build_with(self.case.n)
    }

    fn body(&self) -> Result<ConvexBody> {
        self.case.body.as_ref().ok_or_else(|| missing(self.case, "body"))?.build()
    }

    fn spec(&self) -> Result<ValuationSpec> {
        ValuationSpec::new(self.j()?, self.n()?, self.zeta()?)
    }
}

pub(crate) fn run(case: &IdentityCase, suite: &SuiteOptions) -> Result<Outcome> {
    let mut opts = EvalOptions::default().with_execution(suite.execution);
    if let Some(s) = suite.samples.or(case.samples) {
        opts.samples = s;
    }
    opts.seed = suite.seed.or(case.seed).unwrap_or(0);
    let cx = Ctx { case, opts };
    match case.id {
        IdentityId::CkFunctional => ck_functional(&cx, None),
        IdentityId::CkGeneral => ck_functional(&cx, Some(cx.k()?)),
        IdentityId::CkClassical => {
            let c = classical_ck_check(&cx.body()?, cx.j()?, cx.k()?, &cx.opts)?;
            Ok(Outcome { error: c.error(), samples: cx.opts.samples, ..Outcome::exact(c.lhs, c.rhs) })
        }
        IdentityId::Cone => cone(&cx),
        IdentityId::Retrieval => {
            let (res, c) = retrieval_check(&cx.spec()?, &cx.body()?, &cx.opts)?;
            Ok(Outcome { error: c.error(), evaluations: res.integrand_evaluations, samples: res.subspace_samples, ..Outcome::exact(c.lhs, c.rhs) })
        }
        IdentityId::RRoundtrip => roundtrip(&cx),
        IdentityId::RClosedForm => closed_form(&cx),
        IdentityId::ReillyRadial => {
            let p = case.profile.ok_or_else(|| missing(case, "profile"))?;
            let p = RadialProfile::new(p.p, p.scale)?;
            let cfg = QuadratureConfig::default().with_tolerances(1e-13, 1e-11);
            let c = reilly_radial_check(&p, cx.n()?, cx.j()?, &cx.zeta()?, &cfg)?;
            Ok(Outcome { error: c.error(), ..Outcome::exact(c.lhs, c.rhs) })
        }
        IdentityId::Duality => {
            let (spec, v) = (cx.spec()?, cx.function()?);
            let a = eval_dual(&spec, &v, DualPath::Integral, &cx.opts)?;
            let b = eval_dual(&spec, &v, DualPath::Conjugate, &cx.opts)?;
            Ok(Outcome::pair(&a, &b))
        }
        IdentityId::DualRestriction => {
            let (spec, u, k) = (cx.spec()?, cx.function()?, cx.k()?);
            let a = eval_dual_ck(&spec, &u.conjugate()?, k, &cx.opts)?;
            let b = eval_ck_general(&spec, &u, k, &cx.opts)?;
            Ok(Outcome::pair(&a, &b))
        }
        IdentityId::ConjProjection => conj_projection(&cx),
        IdentityId::ValuationProperty => valuation_property(&cx),
        IdentityId::Invariance => invariance(&cx),
        IdentityId::Homogeneity => {
            let (spec, u) = (cx.spec()?, cx.function()?);
            let lambda = case.lambda.ok_or_else(|| missing(case, "lambda"))?;
            let a = evaluate(&spec, &u.clone().epi_scale(lambda)?, &cx.opts)?;
            let b = evaluate(&spec, &u, &cx.opts)?;
            let f = lambda.powi(spec.j as i32);
            Ok(Outcome { rhs: f * b.value, error: a.error.hypot(f * b.error), ..Outcome::pair(&a, &b) })
        }
        IdentityId::Nonnegativity => {
            let v = nonnegativity_check(&cx.zeta()?, cx.j()?, cx.n()?, 200)?;
            let expect = case.expect_nonnegative.ok_or_else(|| missing(case, "expect_nonnegative"))?;
            let mut o = Outcome::exact(f64::from(u8::from(v.nonnegative)), f64::from(u8::from(expect)));
            o.message = Some(format!("minimum {:e} at s = {:e}", v.min_value, v.argmin));
            Ok(o)
        }
        IdentityId::J0Constancy => j0_constancy(&cx),
    }
}

/// Independent reference for `Z_{j,ζ}(u)`: quadrature for smooth `u`,
/// closed forms for cones and indicators.
fn reference(spec: &ValuationSpec, u: &ConvexFunction, opts: &EvalOptions) -> Result<EvalResult> {
    use crate::valuations::Method;
    match u {
        ConvexFunction::Cone { t, r, .. } => Ok(exact_result(cone_closed_form(spec, *t, *r)?, Method::ClosedForm)),
        ConvexFunction::Indicator(k) => Ok(exact_result(retrieval_value(spec, k)?, Method::ClosedForm)),
        _ if u.is_twice_differentiable() && u.gradient_levels().is_some() => eval_smooth(spec, u, opts),
        _ => unsupported("no independent reference for this function"),
    }
}

fn exact_result(value: f64, method: crate::valuations::Method) -> EvalResult {
    EvalResult { value, error: 0.0, sampling_error: 0.0, quadrature_error: 0.0, method, integrand_evaluations: 0, subspace_samples: 0 }
}

fn ck_functional(cx: &Ctx, k: Option<usize>) -> Result<Outcome> {
    let (spec, u) = (cx.spec()?, cx.function()?);
    let a = match k {
        Some(k) => eval_ck_general(&spec, &u, k, &cx.opts)?,
        None => eval_cauchy_kubota(&spec, &u, &cx.opts)?,
    };
    let b = reference(&spec, &u, &cx.opts)?;
    Ok(Outcome::pair(&a, &b))
}

fn cone(cx: &Ctx) -> Result<Outcome> {
    let (spec, n) = (cx.spec()?, cx.n()?);
    let t = cx.case.t.ok_or_else(|| missing(cx.case, "t"))?;
    let r = cx.case.r.unwrap_or(1.0);
    let u = ConvexFunction::cone(n, t, r)?;
    let a = eval_ck_general(&spec, &u, cx.case.k.unwrap_or(spec.j), &cx.opts)?;
    let exact = cone_closed_form(&spec, t, r)?;
    Ok(Outcome { rhs: exact, error: a.error, ..Outcome::pair(&a, &exact_result(exact, a.method)) })
}

fn transform_grid(zeta: &WeightFunction) -> Vec<f64> {
    log_grid(1e-4, zeta.s_max(), 200)
}

/// Reports the grid point with the largest deviation.
fn worst_on_grid(grid: &[f64], f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> Outcome {
    let mut best = Outcome::exact(0.0, 0.0);
    let mut worst = -1.0;
    for &s in grid {
        let (a, b) = (f(s), g(s));
        let d = (a - b).abs();
        if !(d <= worst) {
            worst = d;
            best = Outcome::exact(a, b);
            best.message = Some(format!("worst at s = {s:e}"));
        }
    }
    best
}

fn roundtrip(cx: &Ctx) -> Result<Outcome> {
    let zeta = cx.zeta()?;
    let l = cx.case.l.ok_or_else(|| missing(cx.case, "l"))?;
    if l < 1 {
        return Err(Error::Schema("r_roundtrip: l must be at least 1".into()));
    }
    let back = transform_r_inverse(&transform_r_power(&zeta, l as u32), l as u32)?;
    Ok(worst_on_grid(&transform_grid(&zeta), |s| back.eval(s), |s| zeta.eval(s)))
}

/// Hand-derived transforms of catalog weights.
fn closed_transform(zeta: &WeightFunction, l: i32) -> Option<Box<dyn Fn(f64) -> f64>> {
    match (zeta.kind(), l) {
        (WeightKind::Tent { s0 }, 1) => {
            let a = *s0;
            Some(Box::new(move |s| if s >= a { 0.0 } else { s * (1.0 - s / a) + (a - s).powi(2) / (2.0 * a) }))
        }
        (WeightKind::Tent { s0 }, 2) => {
            let a = *s0;
            Some(Box::new(move |s| if s >= a { 0.0 } else { a * a / 3.0 - s.powi(3) / (3.0 * a) }))
        }
        (WeightKind::Tent { s0 }, -1) => {
            let a = *s0;
            Some(Box::new(move |s| if s >= a { 0.0 } else { (a / s).ln() / a }))
        }
        (WeightKind::Tent { s0 }, -2) => {
            let a = *s0;
            Some(Box::new(move |s| if s >= a { 0.0 } else { 1.0 / (a * s) - 1.0 / (a * a) }))
        }
        (WeightKind::LogCap, 1) => Some(Box::new(|s| (1.0 - s).max(0.0))),
        _ => None,
    }
}

fn closed_form(cx: &Ctx) -> Result<Outcome> {
    let zeta = cx.zeta()?;
    let l = cx.case.l.ok_or_else(|| missing(cx.case, "l"))?;
    let Some(exact) = closed_transform(&zeta, l) else {
        return unsupported(format!("no closed form on record for this weight with l = {l}"));
    };
    let rz = WeightFunction::transform(zeta.clone(), l);
    let grid: Vec<f64> = if l < 0 { log_grid(1e-3, zeta.s_max() * (1.0 - 1e-9), 200) } else { transform_grid(&zeta) };
    Ok(worst_on_grid(&grid, |s| rz.eval(s), exact))
}

fn conj_projection(cx: &Ctx) -> Result<Outcome> {
    let (u, k) = (cx.function()?, cx.k()?);
    let n = u.dim();
    let streams = RngStreams::new(cx.opts.seed);
    let per_axis = 5usize;
    let mut points = Vec::new();
    for idx in 0..per_axis.pow(k as u32) {
        let mut rem = idx;
        let p: Vec<f64> = (0..k)
            .map(|_| {
                let c = rem % per_axis;
                rem /= per_axis;
                -1.5 + 3.0 * c as f64 / (per_axis - 1) as f64
            })
            .collect();
        points.push(p);
    }
    let mut worst: f64 = 0.0;
    let count = cx.opts.samples.min(64);
    for i in 0..count {
        let e = sample_grassmann(n, k, &mut streams.stream(i as u64))?;
        worst = worst.max(check_conjugate_projection(&u, &e, &points)?);
    }
    Ok(Outcome { samples: count, ..Outcome::exact(worst, 0.0) })
}

fn valuation_property(cx: &Ctx) -> Result<Outcome> {
    let spec = cx.spec()?;
    let k = cx.body()?;
    let l = cx.case.other_body.as_ref().ok_or_else(|| missing(cx.case, "other_body"))?.build()?;
    let union = k.box_union(&l).ok_or_else(|| Error::Schema("valuation_property: union of the boxes is not a box".into()))?;
    let inter = k.box_intersection(&l).ok_or_else(|| Error::Schema("valuation_property: boxes do not intersect".into()))?;
    let z = |b: &ConvexBody| evaluate(&spec, &ConvexFunction::indicator(b.clone()), &cx.opts);
    let (zk, zl, zu, zi) = (z(&k)?, z(&l)?, z(&union)?, z(&inter)?);
    let all = [&zk, &zl, &zu, &zi];
    Ok(Outcome {
        lhs: zk.value + zl.value,
        rhs: zu.value + zi.value,
        error: all.iter().map(|r| r.error * r.error).sum::<f64>().sqrt(),
        evaluations: all.iter().map(|r| r.integrand_evaluations).sum(),
        samples: all.iter().map(|r| r.subspace_samples).sum(),
        message: None,
    })
}

fn invariance(cx: &Ctx) -> Result<Outcome> {
    let (spec, u) = (cx.spec()?, cx.function()?);
    let n = u.dim();
    let mut rng = RngStreams::new(cx.opts.seed).derive(0x1a7).stream(0);
    let q = sample_rotation(n, &mut rng);
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let alpha = rng.random_range(-1.0..1.0);
    let moved = u.clone().rotate(q)?.epi_translate(x0, alpha)?;
    let a = evaluate(&spec, &moved, &cx.opts)?;
    let b = evaluate(&spec, &u, &cx.opts)?;
    Ok(Outcome::pair(&a, &b))
}

/// `Z_{0,ζ}(u)` against `n κ_n ∫ ζ(s) s^{n-1} ds` by direct quadrature.
fn j0_constancy(cx: &Ctx) -> Result<Outcome> {
    let n = cx.n()?;
    let zeta = cx.zeta()?;
    let spec = ValuationSpec::new(0, n, zeta.clone())?;
    let u = cx.function()?;
    let a = eval_cauchy_kubota(&spec, &u, &cx.opts)?;
    let mut breaks = vec![0.0];
    breaks.extend(zeta.breakpoints().iter().copied().filter(|b| *b > 0.0 && *b < zeta.s_max()));
    breaks.push(zeta.s_max());
    let cfg = QuadratureConfig::default().with_tolerances(1e-13, 1e-11);
    let est = integrate_pieces(|s| if s <= 0.0 { 0.0 } else { zeta.eval(s) * s.powi(n as i32 - 1) }, &breaks, Endpoints::SingularLower, &cfg);
    let c = n as f64 * kappa(n);
    Ok(Outcome { lhs: a.value, rhs: c * est.value, error: a.error.hypot(c * est.error), evaluations: est.evaluations, samples: 1, message: None })
}
