use nalgebra::DMatrix;

use super::body::ConvexBody;
use crate::error::{invalid, unsupported, Error, Result};
use crate::numerics::linalg::{add, dot, mat_t_vec, mat_vec, norm, scale, sub};
use crate::numerics::SymMatrix;

/// Convex functions `R^n → (-∞, +∞]` with the closed-form operations needed
/// by the evaluators.
///
/// `EpiTranslated`, `Rotated` and `EpiScaled` act on epigraphs; `Scaled` and
/// `PlusAffine` are their conjugate counterparts.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexFunction {
    /// `½ xᵀAx + bᵀx + c` with `A` positive definite.
    Quadratic { a: SymMatrix, b: Vec<f64>, c: f64 },
    /// `scale · |x|^p / p` with `p > 1`.
    RadialPower { n: usize, p: f64, scale: f64 },
    /// `t|x|` on the ball of radius `r`, `+∞` outside.
    Cone { n: usize, t: f64, r: f64 },
    Indicator(ConvexBody),
    Support(ConvexBody),
    /// `max_i ⟨a_i, x⟩ + b_i`, optionally restricted to a body.
    MaxAffine { slopes: Vec<Vec<f64>>, offsets: Vec<f64>, domain: Option<ConvexBody> },
    /// `max_i a_i |x| + b_i`.
    RadialMaxAffine { n: usize, slopes: Vec<f64>, offsets: Vec<f64> },
    /// `inner(x - x0) + alpha`.
    EpiTranslated { inner: Box<ConvexFunction>, x0: Vec<f64>, alpha: f64 },
    /// `inner(Qᵀx)` for orthogonal `Q`.
    Rotated { inner: Box<ConvexFunction>, q: DMatrix<f64> },
    /// `lambda · inner(x / lambda)`.
    EpiScaled { inner: Box<ConvexFunction>, lambda: f64 },
    /// `factor · inner(x)`.
    Scaled { inner: Box<ConvexFunction>, factor: f64 },
    /// `inner(x) + ⟨slope, x⟩ + offset`.
    PlusAffine { inner: Box<ConvexFunction>, slope: Vec<f64>, offset: f64 },
    /// Infimal convolution of two radial functions.
    InfConv { left: Box<ConvexFunction>, right: Box<ConvexFunction> },
    /// Pointwise sum.
    Sum { left: Box<ConvexFunction>, right: Box<ConvexFunction> },
}

/// Radius law of the gradient level sets `{ |∇u| ≤ c }`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadiusLaw {
    /// radius `c`.
    Linear,
    /// radius `(c / scale)^{1/(p-1)}`.
    Power { scale: f64, p: f64 },
}

/// `{ x : |∇u(x)| ≤ c } = { (x - center)ᵀ shape (x - center) ≤ radius(c)² }`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientLevels {
    pub center: Vec<f64>,
    pub shape: SymMatrix,
    pub law: RadiusLaw,
    pub factor: f64,
    pub arg_scale: f64,
}

impl GradientLevels {
    pub fn radius(&self, c: f64) -> f64 {
        let c = c * self.arg_scale;
        self.factor
            * match self.law {
                RadiusLaw::Linear => c,
                RadiusLaw::Power { scale, p } => (c / scale).powf(1.0 / (p - 1.0)),
            }
    }
}

const TOL: f64 = 1e-12;

fn check_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return invalid(format!("dimension mismatch: {a} vs {b}"));
    }
    Ok(())
}

impl ConvexFunction {
    pub fn quadratic(a: SymMatrix, b: Vec<f64>, c: f64) -> Result<Self> {
        check_dim(a.dim(), b.len())?;
        if !a.is_positive_definite(1e-10) {
            return invalid("quadratic needs a positive definite matrix");
        }
        Ok(ConvexFunction::Quadratic { a, b, c })
    }

    /// `½|x|²` on `R^n`.
    pub fn half_square(n: usize) -> Self {
        ConvexFunction::Quadratic { a: SymMatrix::identity(n), b: vec![0.0; n], c: 0.0 }
    }

    pub fn radial_power(n: usize, p: f64, scale: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite() && scale > 0.0 && scale.is_finite()) || n == 0 {
            return invalid("radial power needs p > 1 and scale > 0");
        }
        Ok(ConvexFunction::RadialPower { n, p, scale })
    }

    pub fn cone(n: usize, t: f64, r: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite() && r > 0.0 && r.is_finite()) || n == 0 {
            return invalid("cone needs t >= 0 and r > 0");
        }
        Ok(ConvexFunction::Cone { n, t, r })
    }

    pub fn indicator(body: ConvexBody) -> Self {
        ConvexFunction::Indicator(body)
    }

    pub fn support(body: ConvexBody) -> Self {
        ConvexFunction::Support(body)
    }

    pub fn max_affine(slopes: Vec<Vec<f64>>, offsets: Vec<f64>, domain: Option<ConvexBody>) -> Result<Self> {
        if slopes.is_empty() || slopes.len() != offsets.len() {
            return invalid("max-affine needs matching slopes and offsets");
        }
        let n = slopes[0].len();
        if slopes.iter().any(|s| s.len() != n) || domain.as_ref().is_some_and(|d| d.dim() != n) {
            return invalid("max-affine slopes must share one dimension");
        }
        Ok(ConvexFunction::MaxAffine { slopes, offsets, domain })
    }

    pub fn radial_max_affine(n: usize, slopes: Vec<f64>, offsets: Vec<f64>) -> Result<Self> {
        if slopes.is_empty() || slopes.len() != offsets.len() || slopes.iter().any(|s| *s < 0.0) {
            return invalid("radial max-affine needs matching non-negative slopes and offsets");
        }
        Ok(ConvexFunction::RadialMaxAffine { n, slopes, offsets })
    }

    pub fn epi_translate(self, x0: Vec<f64>, alpha: f64) -> Result<Self> {
        check_dim(self.dim(), x0.len())?;
        Ok(ConvexFunction::EpiTranslated { inner: Box::new(self), x0, alpha })
    }

    pub fn rotate(self, q: DMatrix<f64>) -> Result<Self> {
        check_dim(self.dim(), q.nrows())?;
        let n = q.nrows();
        if q.ncols() != n || (q.transpose() * &q - DMatrix::identity(n, n)).abs().max() > 1e-9 {
            return invalid("rotation matrix must be orthogonal");
        }
        Ok(ConvexFunction::Rotated { inner: Box::new(self), q })
    }

    pub fn epi_scale(self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return invalid("epi-scaling needs lambda > 0");
        }
        Ok(ConvexFunction::EpiScaled { inner: Box::new(self), lambda })
    }

    pub fn scale_by(self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return invalid("scaling needs a positive factor");
        }
        Ok(ConvexFunction::Scaled { inner: Box::new(self), factor })
    }

    pub fn plus_affine(self, slope: Vec<f64>, offset: f64) -> Result<Self> {
        check_dim(self.dim(), slope.len())?;
        Ok(ConvexFunction::PlusAffine { inner: Box::new(self), slope, offset })
    }

    pub fn sum(self, other: Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(ConvexFunction::Sum { left: Box::new(self), right: Box::new(other) })
    }

    /// Infimal convolution, simplified to a closed form where one exists.
    pub fn inf_conv(self, other: Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        match (&self, &other) {
            (ConvexFunction::Quadratic { .. }, ConvexFunction::Quadratic { .. }) => {
                let s = self.conjugate()?.sum(other.conjugate()?)?;
                super::conjugate::collapse_quadratic_sum(&s)?.conjugate()
            }
            (ConvexFunction::Indicator(k), ConvexFunction::Indicator(l)) => Ok(ConvexFunction::Indicator(k.minkowski_sum(l)?)),
            _ if self.is_radial() && other.is_radial() => Ok(ConvexFunction::InfConv { left: Box::new(self), right: Box::new(other) }),
            _ => unsupported("infimal convolution without a closed form or radial structure"),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexFunction::Quadratic { a, .. } => a.dim(),
            ConvexFunction::RadialPower { n, .. } | ConvexFunction::Cone { n, .. } | ConvexFunction::RadialMaxAffine { n, .. } => *n,
            ConvexFunction::Indicator(k) | ConvexFunction::Support(k) => k.dim(),
            ConvexFunction::MaxAffine { slopes, .. } => slopes[0].len(),
            ConvexFunction::EpiTranslated { inner, .. }
            | ConvexFunction::Rotated { inner, .. }
            | ConvexFunction::EpiScaled { inner, .. }
            | ConvexFunction::Scaled { inner, .. }
            | ConvexFunction::PlusAffine { inner, .. } => inner.dim(),
            ConvexFunction::InfConv { left, .. } | ConvexFunction::Sum { left, .. } => left.dim(),
        }
    }

    /// Invariant under rotations about the origin.
    pub fn is_radial(&self) -> bool {
        match self {
            ConvexFunction::RadialPower { .. } | ConvexFunction::Cone { .. } | ConvexFunction::RadialMaxAffine { .. } => true,
            ConvexFunction::Indicator(ConvexBody::Ball { center, .. }) | ConvexFunction::Support(ConvexBody::Ball { center, .. }) => {
                center.iter().all(|c| *c == 0.0)
            }
            ConvexFunction::Quadratic { a, b, .. } => {
                let d = a.get(0, 0);
                b.iter().all(|x| *x == 0.0) && (0..a.dim()).all(|i| (0..a.dim()).all(|j| a.get(i, j) == if i == j { d } else { 0.0 }))
            }
            ConvexFunction::Rotated { inner, .. } | ConvexFunction::EpiScaled { inner, .. } | ConvexFunction::Scaled { inner, .. } => {
                inner.is_radial()
            }
            ConvexFunction::EpiTranslated { inner, x0, .. } => inner.is_radial() && x0.iter().all(|x| *x == 0.0),
            ConvexFunction::InfConv { left, right } | ConvexFunction::Sum { left, right } => left.is_radial() && right.is_radial(),
            _ => false,
        }
    }

    pub fn is_super_coercive(&self) -> bool {
        match self {
            ConvexFunction::Quadratic { .. } | ConvexFunction::RadialPower { .. } | ConvexFunction::Cone { .. } | ConvexFunction::Indicator(_) => true,
            ConvexFunction::MaxAffine { domain, .. } => domain.is_some(),
            ConvexFunction::Support(_) | ConvexFunction::RadialMaxAffine { .. } => false,
            ConvexFunction::EpiTranslated { inner, .. }
            | ConvexFunction::Rotated { inner, .. }
            | ConvexFunction::EpiScaled { inner, .. }
            | ConvexFunction::Scaled { inner, .. }
            | ConvexFunction::PlusAffine { inner, .. } => inner.is_super_coercive(),
            ConvexFunction::InfConv { left, right } => left.is_super_coercive() && right.is_super_coercive(),
            ConvexFunction::Sum { left, right } => left.is_super_coercive() || right.is_super_coercive(),
        }
    }

    /// Finite everywhere.
    pub fn is_finite_valued(&self) -> bool {
        match self {
            ConvexFunction::Quadratic { .. } | ConvexFunction::RadialPower { .. } | ConvexFunction::Support(_) | ConvexFunction::RadialMaxAffine { .. } => true,
            ConvexFunction::MaxAffine { domain, .. } => domain.is_none(),
            ConvexFunction::Cone { .. } | ConvexFunction::Indicator(_) => false,
            ConvexFunction::EpiTranslated { inner, .. }
            | ConvexFunction::Rotated { inner, .. }
            | ConvexFunction::EpiScaled { inner, .. }
            | ConvexFunction::Scaled { inner, .. }
            | ConvexFunction::PlusAffine { inner, .. } => inner.is_finite_valued(),
            ConvexFunction::InfConv { left, right } => left.is_finite_valued() || right.is_finite_valued(),
            ConvexFunction::Sum { left, right } => left.is_finite_valued() && right.is_finite_valued(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ConvexFunction::Quadratic { a, b, c } => 0.5 * a.quad_form(x) + dot(b, x) + c,
            ConvexFunction::RadialPower { p, scale, .. } => scale * norm(x).powf(*p) / p,
            ConvexFunction::Cone { t, r, .. } => {
                let rho = norm(x);
                if rho <= r * (1.0 + TOL) { t * rho } else { f64::INFINITY }
            }
            ConvexFunction::Indicator(k) => {
                if k.contains(x, TOL * (1.0 + norm(x))) { 0.0 } else { f64::INFINITY }
            }
            ConvexFunction::Support(k) => k.support(x),
            ConvexFunction::MaxAffine { slopes, offsets, domain } => {
                if domain.as_ref().is_some_and(|d| !d.contains(x, TOL)) {
                    return f64::INFINITY;
                }
                slopes.iter().zip(offsets).map(|(a, b)| dot(a, x) + b).fold(f64::NEG_INFINITY, f64::max)
            }
            ConvexFunction::RadialMaxAffine { slopes, offsets, .. } => {
                let rho = norm(x);
                slopes.iter().zip(offsets).map(|(a, b)| a * rho + b).fold(f64::NEG_INFINITY, f64::max)
            }
            ConvexFunction::EpiTranslated { inner, x0, alpha } => inner.eval(&sub(x, x0)) + alpha,
            ConvexFunction::Rotated { inner, q } => inner.eval(&mat_t_vec(q, x)),
            ConvexFunction::EpiScaled { inner, lambda } => lambda * inner.eval(&scale(x, 1.0 / lambda)),
            ConvexFunction::Scaled { inner, factor } => factor * inner.eval(x),
            ConvexFunction::PlusAffine { inner, slope, offset } => inner.eval(x) + dot(slope, x) + offset,
            ConvexFunction::Sum { left, right } => left.eval(x) + right.eval(x),
            ConvexFunction::InfConv { left, right } => {
                let rho = norm(x);
                let (v, _) = radial_split(left, right, rho);
                v
            }
        }
    }

    /// Gradient at a point of differentiability.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = x.len();
        match self {
            ConvexFunction::Quadratic { a, b, .. } => Ok(add(&a.mul_vec(x), b)),
            ConvexFunction::RadialPower { p, scale: s, .. } => {
                let rho = norm(x);
                if rho == 0.0 { Ok(vec![0.0; n]) } else { Ok(scale(x, s * rho.powf(p - 2.0))) }
            }
            ConvexFunction::Cone { t, r, .. } => {
                let rho = norm(x);
                if rho > 0.0 && rho < *r {
                    Ok(scale(x, t / rho))
                } else if rho == 0.0 && *t == 0.0 {
                    Ok(vec![0.0; n])
                } else {
                    Err(Error::NotDifferentiable)
                }
            }
            ConvexFunction::Indicator(k) => {
                if k.contains(x, 0.0) && k.normal_rays(x, 1e-12).is_empty() { Ok(vec![0.0; n]) } else { Err(Error::NotDifferentiable) }
            }
            ConvexFunction::Support(k) => match k.face(x, 1e-12) {
                Some(f) if f.len() == 1 => Ok(f[0].clone()),
                _ => Err(Error::NotDifferentiable),
            },
            ConvexFunction::MaxAffine { slopes, offsets, domain } => {
                if let Some(d) = domain {
                    if !d.contains(x, 0.0) || !d.normal_rays(x, 1e-12).is_empty() {
                        return Err(Error::NotDifferentiable);
                    }
                }
                let vals: Vec<f64> = slopes.iter().zip(offsets).map(|(a, b)| dot(a, x) + b).collect();
                let best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let active: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= best - 1e-12).collect();
                if active.len() == 1 { Ok(slopes[active[0]].clone()) } else { Err(Error::NotDifferentiable) }
            }
            ConvexFunction::RadialMaxAffine { slopes, offsets, .. } => {
                let rho = norm(x);
                let vals: Vec<f64> = slopes.iter().zip(offsets).map(|(a, b)| a * rho + b).collect();
                let best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let active: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= best - 1e-12).collect();
                let smax = active.iter().map(|&i| slopes[i]).fold(0.0, f64::max);
                if rho == 0.0 {
                    if smax == 0.0 { Ok(vec![0.0; n]) } else { Err(Error::NotDifferentiable) }
                } else if active.iter().all(|&i| slopes[i] == slopes[active[0]]) {
                    Ok(scale(x, slopes[active[0]] / rho))
                } else {
                    Err(Error::NotDifferentiable)
                }
            }
            ConvexFunction::EpiTranslated { inner, x0, .. } => inner.gradient(&sub(x, x0)),
            ConvexFunction::Rotated { inner, q } => Ok(mat_vec(q, &inner.gradient(&mat_t_vec(q, x))?)),
            ConvexFunction::EpiScaled { inner, lambda } => inner.gradient(&scale(x, 1.0 / lambda)),
            ConvexFunction::Scaled { inner, factor } => Ok(scale(&inner.gradient(x)?, *factor)),
            ConvexFunction::PlusAffine { inner, slope, .. } => Ok(add(&inner.gradient(x)?, slope)),
            ConvexFunction::Sum { left, right } => Ok(add(&left.gradient(x)?, &right.gradient(x)?)),
            ConvexFunction::InfConv { left, right } => {
                let rho = norm(x);
                let (_, a) = radial_split(left, right, rho);
                let dir: Vec<f64> = if rho > 0.0 { scale(x, 1.0 / rho) } else { vec![0.0; n] };
                left.gradient(&scale(&dir, a)).or_else(|_| right.gradient(&scale(&dir, rho - a)))
            }
        }
    }

    /// Hessian; defined for quadratics, radial powers and their transforms.
    pub fn hessian(&self, x: &[f64]) -> Result<SymMatrix> {
        let n = x.len();
        match self {
            ConvexFunction::Quadratic { a, .. } => Ok(a.clone()),
            ConvexFunction::RadialPower { p, scale: s, .. } => {
                let rho = norm(x);
                if rho == 0.0 {
                    return if *p == 2.0 {
                        Ok(SymMatrix::identity(n).scaled(*s))
                    } else if *p > 2.0 {
                        Ok(SymMatrix::zeros(n))
                    } else {
                        Err(Error::NotDifferentiable)
                    };
                }
                let f = s * rho.powf(p - 2.0);
                let g = f * (p - 2.0) / (rho * rho);
                let mut h = SymMatrix::zeros(n);
                for i in 0..n {
                    for j in i..n {
                        h.set(i, j, g * x[i] * x[j] + if i == j { f } else { 0.0 });
                    }
                }
                Ok(h)
            }
            ConvexFunction::EpiTranslated { inner, x0, .. } => inner.hessian(&sub(x, x0)),
            ConvexFunction::Rotated { inner, q } => {
                let h = inner.hessian(&mat_t_vec(q, x))?;
                Ok(SymMatrix::from_dmatrix(&(q * h.to_dmatrix() * q.transpose())))
            }
            ConvexFunction::EpiScaled { inner, lambda } => Ok(inner.hessian(&scale(x, 1.0 / lambda))?.scaled(1.0 / lambda)),
            ConvexFunction::Scaled { inner, factor } => Ok(inner.hessian(x)?.scaled(*factor)),
            ConvexFunction::PlusAffine { inner, .. } => inner.hessian(x),
            ConvexFunction::Sum { left, right } => Ok(left.hessian(x)?.add(&right.hessian(x)?)),
            _ => Err(Error::NotDifferentiable),
        }
    }

    /// Twice differentiable on the whole space, except possibly at the minimizer.
    pub fn is_twice_differentiable(&self) -> bool {
        match self {
            ConvexFunction::Quadratic { .. } | ConvexFunction::RadialPower { .. } => true,
            ConvexFunction::EpiTranslated { inner, .. }
            | ConvexFunction::Rotated { inner, .. }
            | ConvexFunction::EpiScaled { inner, .. }
            | ConvexFunction::Scaled { inner, .. }
            | ConvexFunction::PlusAffine { inner, .. } => inner.is_twice_differentiable(),
            ConvexFunction::Sum { left, right } => left.is_twice_differentiable() && right.is_twice_differentiable(),
            _ => false,
        }
    }

    /// Ellipsoidal description of the gradient level sets, when available.
    pub fn gradient_levels(&self) -> Option<GradientLevels> {
        match self {
            ConvexFunction::Quadratic { a, b, .. } => {
                let center = a.solve(b).ok()?.iter().map(|v| -v).collect();
                let am = a.to_dmatrix();
                Some(GradientLevels { center, shape: SymMatrix::from_dmatrix(&(&am * &am)), law: RadiusLaw::Linear, factor: 1.0, arg_scale: 1.0 })
            }
            ConvexFunction::RadialPower { n, p, scale } => Some(GradientLevels {
                center: vec![0.0; *n],
                shape: SymMatrix::identity(*n),
                law: RadiusLaw::Power { scale: *scale, p: *p },
                factor: 1.0,
                arg_scale: 1.0,
            }),
            ConvexFunction::EpiTranslated { inner, x0, .. } => {
                let g = inner.gradient_levels()?;
                Some(GradientLevels { center: add(&g.center, x0), ..g })
            }
            ConvexFunction::Rotated { inner, q } => {
                let g = inner.gradient_levels()?;
                Some(GradientLevels {
                    center: mat_vec(q, &g.center),
                    shape: SymMatrix::from_dmatrix(&(q * g.shape.to_dmatrix() * q.transpose())),
                    ..g
                })
            }
            ConvexFunction::EpiScaled { inner, lambda } => {
                let g = inner.gradient_levels()?;
                Some(GradientLevels { center: scale(&g.center, *lambda), factor: g.factor * lambda, ..g })
            }
            ConvexFunction::Scaled { inner, factor } => {
                let g = inner.gradient_levels()?;
                Some(GradientLevels { arg_scale: g.arg_scale / factor, ..g })
            }
            _ => None,
        }
    }

    /// Bounding box of the effective domain, when bounded.
    pub fn domain_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            ConvexFunction::Cone { n, r, .. } => Some((vec![-r; *n], vec![*r; *n])),
            ConvexFunction::Indicator(k) => Some(k.bounding_box()),
            ConvexFunction::MaxAffine { domain: Some(d), .. } => Some(d.bounding_box()),
            ConvexFunction::EpiTranslated { inner, x0, .. } => inner.domain_box().map(|(l, h)| (add(&l, x0), add(&h, x0))),
            ConvexFunction::EpiScaled { inner, lambda } => inner.domain_box().map(|(l, h)| (scale(&l, *lambda), scale(&h, *lambda))),
            ConvexFunction::Scaled { inner, .. } | ConvexFunction::PlusAffine { inner, .. } => inner.domain_box(),
            ConvexFunction::Rotated { inner, q } => {
                let (l, h) = inner.domain_box()?;
                // image of the box under Q, boxed again
                let d = l.len();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for m in 0..1usize << d {
                    let v: Vec<f64> = (0..d).map(|i| if m >> i & 1 == 1 { h[i] } else { l[i] }).collect();
                    let w = mat_vec(q, &v);
                    for i in 0..d {
                        lo[i] = lo[i].min(w[i]);
                        hi[i] = hi[i].max(w[i]);
                    }
                }
                Some((lo, hi))
            }
            ConvexFunction::Sum { left, right } => match (left.domain_box(), right.domain_box()) {
                (Some((l1, h1)), Some((l2, h2))) => Some((
                    l1.iter().zip(&l2).map(|(a, b)| a.max(*b)).collect(),
                    h1.iter().zip(&h2).map(|(a, b)| a.min(*b)).collect(),
                )),
                (Some(b), None) | (None, Some(b)) => Some(b),
                _ => None,
            },
            ConvexFunction::InfConv { left, right } => match (left.domain_box(), right.domain_box()) {
                (Some((l1, h1)), Some((l2, h2))) => Some((add(&l1, &l2), add(&h1, &h2))),
                _ => None,
            },
            _ => None,
        }
    }

    /// A point of the effective domain, used to start inner minimizations.
    pub fn domain_point(&self) -> Vec<f64> {
        match self {
            ConvexFunction::Indicator(k) => k.center(),
            ConvexFunction::MaxAffine { domain: Some(d), .. } => d.center(),
            ConvexFunction::EpiTranslated { inner, x0, .. } => add(&inner.domain_point(), x0),
            ConvexFunction::EpiScaled { inner, lambda } => scale(&inner.domain_point(), *lambda),
            ConvexFunction::Rotated { inner, q } => mat_vec(q, &inner.domain_point()),
            ConvexFunction::Scaled { inner, .. } | ConvexFunction::PlusAffine { inner, .. } => inner.domain_point(),
            ConvexFunction::Sum { left, right } => {
                if left.is_finite_valued() { right.domain_point() } else { left.domain_point() }
            }
            _ => vec![0.0; self.dim()],
        }
    }
}

/// Minimizes `left(a e) + right((ρ - a) e)` over `a ∈ [0, ρ]` by golden section.
pub(crate) fn radial_split(left: &ConvexFunction, right: &ConvexFunction, rho: f64) -> (f64, f64) {
    let n = left.dim();
    let along = |f: &ConvexFunction, s: f64| {
        let mut e = vec![0.0; n];
        e[0] = s;
        f.eval(&e)
    };
    let g = |a: f64| along(left, a) + along(right, rho - a);
    if rho == 0.0 {
        return (g(0.0), 0.0);
    }
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0, rho);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-15 * rho {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = g(x2);
        }
    }
    let mut best = (f1.min(f2), if f1 <= f2 { x1 } else { x2 });
    for a in [0.0, rho] {
        let v = g(a);
        if v < best.0 {
            best = (v, a);
        }
    }
    best
}
