//! Linear subspaces, Haar sampling on Grassmannians and rotation groups,
//! projections and restrictions of convex functions.
//!
//! A subspace `E` of dimension `k` is identified with `R^k` through its stored
//! orthonormal frame `F`; `proj_E u(y) = min_z u(F y + G z)` where the columns
//! of `G` span the orthogonal complement.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::convex::{ConvexBody, ConvexFunction};
use crate::error::{invalid, unsupported, Error, Result};
use crate::numerics::linalg::{add, dot, mat_t_vec, mat_vec, norm, sub};
use crate::numerics::SymMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    frame: DMatrix<f64>,
    complement: DMatrix<f64>,
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of `diag(R)` moved into `Q`.
fn haar_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Haar-distributed rotation (determinant `+1`).
pub fn sample_rotation<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut q = haar_orthogonal(n, rng);
    if n > 0 && q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Haar-distributed `k`-dimensional subspace of `R^n`.
pub fn sample_grassmann<R: Rng>(n: usize, k: usize, rng: &mut R) -> Result<Subspace> {
    if k > n {
        return invalid("subspace dimension exceeds ambient dimension");
    }
    let q = sample_rotation(n, rng);
    Ok(Subspace { frame: q.columns(0, k).into_owned(), complement: q.columns(k, n - k).into_owned() })
}

impl Subspace {
    /// Span of the first `k` coordinate vectors.
    pub fn coordinate(n: usize, k: usize) -> Self {
        let id = DMatrix::<f64>::identity(n, n);
        Self { frame: id.columns(0, k).into_owned(), complement: id.columns(k, n - k).into_owned() }
    }

    /// Subspace spanned by the columns of `frame` (orthonormalized).
    pub fn from_frame(frame: &DMatrix<f64>) -> Result<Self> {
        let (n, k) = frame.shape();
        if k > n {
            return invalid("frame has more columns than rows");
        }
        let mut full = DMatrix::zeros(n, k + n);
        full.columns_mut(0, k).copy_from(frame);
        full.columns_mut(k, n).copy_from(&DMatrix::identity(n, n));
        // modified Gram–Schmidt, keeping the first n independent columns
        let mut basis: Vec<nalgebra::DVector<f64>> = Vec::new();
        for c in 0..k + n {
            let mut v = full.column(c).into_owned();
            for b in &basis {
                let p = b.dot(&v);
                v -= b * p;
            }
            let nv = v.norm();
            if nv > 1e-10 {
                basis.push(v / nv);
            } else if c < k {
                return invalid("frame columns are linearly dependent");
            }
            if basis.len() == n {
                break;
            }
        }
        let all = DMatrix::from_columns(&basis);
        Ok(Self { frame: all.columns(0, k).into_owned(), complement: all.columns(k, n - k).into_owned() })
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn complement(&self) -> &DMatrix<f64> {
        &self.complement
    }

    /// `F y`.
    pub fn embed(&self, y: &[f64]) -> Vec<f64> {
        mat_vec(&self.frame, y)
    }

    /// `Fᵀ x`.
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        mat_t_vec(&self.frame, x)
    }

    fn rotated(&self, q: &DMatrix<f64>) -> Self {
        Self { frame: q.transpose() * &self.frame, complement: q.transpose() * &self.complement }
    }
}

/// Result of an inner minimization over a fibre `y + E^⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerMin {
    pub value: f64,
    pub argmin: Vec<f64>,
    pub iterations: usize,
}

/// `proj_E u` evaluated by coordinate descent over `E^⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericProjection {
    pub source: ConvexFunction,
    pub subspace: Subspace,
}

impl NumericProjection {
    pub fn eval(&self, y: &[f64]) -> Result<InnerMin> {
        fiber_minimize(&self.source, &self.subspace, y)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Projection {
    Closed(ConvexFunction),
    Numeric(NumericProjection),
}

impl Projection {
    pub fn closed(self) -> Result<ConvexFunction> {
        match self {
            Projection::Closed(f) => Ok(f),
            Projection::Numeric(_) => unsupported("projection has no closed form"),
        }
    }

    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        match self {
            Projection::Closed(f) => Ok(f.eval(y)),
            Projection::Numeric(p) => Ok(p.eval(y)?.value),
        }
    }
}

/// Closed-form projection where the variant allows it.
fn project_closed(u: &ConvexFunction, e: &Subspace) -> Option<ConvexFunction> {
    let k = e.dim();
    match u {
        ConvexFunction::Quadratic { a, b, c } => {
            let am = a.to_dmatrix();
            let (f, g) = (&e.frame, &e.complement);
            let aff = f.transpose() * &am * f;
            let bf = mat_t_vec(f, b);
            if g.ncols() == 0 {
                return Some(ConvexFunction::Quadratic { a: SymMatrix::from_dmatrix(&aff), b: bf, c: *c });
            }
            let agg_inv = (g.transpose() * &am * g).try_inverse()?;
            let afg = f.transpose() * &am * g;
            let s = &aff - &afg * &agg_inv * afg.transpose();
            let gb = mat_t_vec(g, b);
            let w = mat_vec(&agg_inv, &gb);
            let b_e = sub(&bf, &mat_vec(&afg, &w));
            let c_e = c - 0.5 * dot(&gb, &w);
            Some(ConvexFunction::Quadratic { a: SymMatrix::from_dmatrix(&s), b: b_e, c: c_e })
        }
        ConvexFunction::RadialPower { p, scale, .. } => Some(ConvexFunction::RadialPower { n: k, p: *p, scale: *scale }),
        ConvexFunction::Cone { t, r, .. } => Some(ConvexFunction::Cone { n: k, t: *t, r: *r }),
        ConvexFunction::Indicator(body) => Some(ConvexFunction::Indicator(body.project(&e.frame).ok()?)),
        ConvexFunction::EpiTranslated { inner, x0, alpha } => {
            Some(ConvexFunction::EpiTranslated { inner: Box::new(project_closed(inner, e)?), x0: e.coords(x0), alpha: *alpha })
        }
        ConvexFunction::Rotated { inner, q } => project_closed(inner, &e.rotated(q)),
        ConvexFunction::EpiScaled { inner, lambda } => Some(ConvexFunction::EpiScaled { inner: Box::new(project_closed(inner, e)?), lambda: *lambda }),
        ConvexFunction::Scaled { inner, factor } => Some(ConvexFunction::Scaled { inner: Box::new(project_closed(inner, e)?), factor: *factor }),
        ConvexFunction::InfConv { left, right } => project_closed(left, e)?.inf_conv(project_closed(right, e)?).ok(),
        _ => None,
    }
}

/// `proj_E u`, in closed form when possible and by inner minimization otherwise.
pub fn project_function(u: &ConvexFunction, e: &Subspace) -> Result<Projection> {
    if u.dim() != e.ambient_dim() {
        return invalid("function and subspace dimensions differ");
    }
    if !u.is_super_coercive() {
        return invalid("projection needs a super-coercive function");
    }
    Ok(match project_closed(u, e) {
        Some(f) => Projection::Closed(f),
        None => Projection::Numeric(NumericProjection { source: u.clone(), subspace: e.clone() }),
    })
}

/// `v|_E` for finite-valued `v`.
pub fn restrict_function(v: &ConvexFunction, e: &Subspace) -> Result<ConvexFunction> {
    let k = e.dim();
    let f = &e.frame;
    Ok(match v {
        ConvexFunction::Quadratic { a, b, c } => ConvexFunction::Quadratic { a: a.congruence(f), b: mat_t_vec(f, b), c: *c },
        ConvexFunction::RadialPower { p, scale, .. } => ConvexFunction::RadialPower { n: k, p: *p, scale: *scale },
        ConvexFunction::RadialMaxAffine { slopes, offsets, .. } => ConvexFunction::RadialMaxAffine { n: k, slopes: slopes.clone(), offsets: offsets.clone() },
        ConvexFunction::Support(body) => ConvexFunction::Support(body.project(f)?),
        ConvexFunction::MaxAffine { slopes, offsets, domain: None } => ConvexFunction::MaxAffine {
            slopes: slopes.iter().map(|a| mat_t_vec(f, a)).collect(),
            offsets: offsets.clone(),
            domain: None,
        },
        ConvexFunction::Rotated { inner, q } => restrict_function(inner, &e.rotated(q))?,
        ConvexFunction::EpiScaled { inner, lambda } => ConvexFunction::EpiScaled { inner: Box::new(restrict_function(inner, e)?), lambda: *lambda },
        ConvexFunction::Scaled { inner, factor } => ConvexFunction::Scaled { inner: Box::new(restrict_function(inner, e)?), factor: *factor },
        ConvexFunction::PlusAffine { inner, slope, offset } => {
            ConvexFunction::PlusAffine { inner: Box::new(restrict_function(inner, e)?), slope: mat_t_vec(f, slope), offset: *offset }
        }
        ConvexFunction::EpiTranslated { inner, x0, alpha } if norm(&mat_t_vec(&e.complement, x0)) <= 1e-12 * (1.0 + norm(x0)) => {
            ConvexFunction::EpiTranslated { inner: Box::new(restrict_function(inner, e)?), x0: e.coords(x0), alpha: *alpha }
        }
        ConvexFunction::Sum { left, right } => ConvexFunction::Sum { left: Box::new(restrict_function(left, e)?), right: Box::new(restrict_function(right, e)?) },
        _ => return unsupported("restriction needs a finite-valued function with closed form"),
    })
}

/// Minimizes a convex function of one variable: bracket by doubling, then golden section.
fn line_minimize<F: Fn(f64) -> f64>(phi: F, step: f64) -> (f64, f64) {
    let f0 = phi(0.0);
    let (mut a, mut b);
    let (fp, fm) = (phi(step), phi(-step));
    if fp < f0 {
        let mut t = step;
        let mut ft = fp;
        loop {
            let f2 = phi(2.0 * t);
            if !(f2 < ft) || t > 1e12 {
                break;
            }
            t *= 2.0;
            ft = f2;
        }
        a = t / 2.0;
        b = 2.0 * t;
        if t == step {
            a = 0.0;
        }
    } else if fm < f0 {
        let mut t = step;
        let mut ft = fm;
        loop {
            let f2 = phi(-2.0 * t);
            if !(f2 < ft) || t > 1e12 {
                break;
            }
            t *= 2.0;
            ft = f2;
        }
        a = -2.0 * t;
        b = if t == step { 0.0 } else { -t / 2.0 };
    } else {
        a = -step;
        b = step;
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    for _ in 0..120 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = phi(x2);
        }
    }
    let (t, ft) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if ft <= f0 { (t, ft) } else { (0.0, f0) }
}

/// `min_z u(F y + G z)` by coordinate descent with exact line searches.
pub fn fiber_minimize(u: &ConvexFunction, e: &Subspace, y: &[f64]) -> Result<InnerMin> {
    let base = e.embed(y);
    let m = e.complement.ncols();
    let point = |z: &[f64]| add(&base, &mat_vec(&e.complement, z));
    let g = |z: &[f64]| u.eval(&point(z));
    let mut z = vec![0.0; m];
    if m == 0 {
        return Ok(InnerMin { value: u.eval(&base), argmin: base, iterations: 0 });
    }
    if !g(&z).is_finite() {
        z = mat_t_vec(&e.complement, &sub(&u.domain_point(), &base));
    }
    let mut value = g(&z);
    if !value.is_finite() {
        return Err(Error::MinimizerNotFound("no feasible point on the fibre".into()));
    }
    let scale = u.domain_box().map_or(1.0, |(l, h)| norm(&sub(&h, &l)).max(1e-6));
    let mut iterations = 0;
    for sweep in 0..500 {
        iterations = sweep + 1;
        let before = value;
        for i in 0..m {
            let (t, v) = line_minimize(
                |t| {
                    let mut w = z.clone();
                    w[i] += t;
                    g(&w)
                },
                scale * 0.5f64.powi(sweep.min(30) as i32),
            );
            z[i] += t;
            value = v;
        }
        if (before - value).abs() <= 1e-10 * (1.0 + value.abs()) && sweep > 0 {
            break;
        }
    }
    Ok(InnerMin { value, argmin: point(&z), iterations })
}

/// Largest discrepancy `|(proj_E u)*(y) - (u*)|_E(y)|` over `points` in `E` coordinates.
pub fn check_conjugate_projection(u: &ConvexFunction, e: &Subspace, points: &[Vec<f64>]) -> Result<f64> {
    let lhs = project_function(u, e)?.closed()?.conjugate()?;
    let rhs = restrict_function(&u.conjugate()?, e)?;
    let mut worst = 0.0f64;
    for y in points {
        let (a, b) = (lhs.eval(y), rhs.eval(y));
        let d = if a == b { 0.0 } else { (a - b).abs() };
        worst = worst.max(d);
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubgradientVerdict {
    pub holds: bool,
    pub max_violation: f64,
    pub minimizer: Vec<f64>,
}

/// Checks that a gradient of `proj_E u` at `y` lifts to a subgradient of `u`
/// at the fibre minimizer.
pub fn check_projection_subgradient<R: Rng>(u: &ConvexFunction, e: &Subspace, y: &[f64], trials: usize, rng: &mut R) -> Result<SubgradientVerdict> {
    let proj = project_function(u, e)?;
    let min = fiber_minimize(u, e, y)?;
    let grad = match &proj {
        Projection::Closed(p) => p.gradient(y)?,
        Projection::Numeric(_) => return unsupported("gradient of a numeric projection"),
    };
    let lifted = e.embed(&grad);
    let x = &min.argmin;
    let ux = u.eval(x);
    let n = x.len();
    let spread = u.domain_box().map_or(2.0, |(l, h)| norm(&sub(&h, &l)));
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let step: Vec<f64> = (0..n).map(|_| spread * (rng.random::<f64>() - 0.5)).collect();
        let z = add(x, &step);
        let uz = u.eval(&z);
        if !uz.is_finite() {
            continue;
        }
        let gap = ux + dot(&lifted, &step) - uz;
        worst = worst.max(gap);
    }
    let tol = 1e-7 * (1.0 + ux.abs());
    Ok(SubgradientVerdict { holds: worst <= tol, max_violation: worst, minimizer: min.argmin })
}

/// Projection of a body onto a subspace, in subspace coordinates.
pub fn project_body(k: &ConvexBody, e: &Subspace) -> Result<ConvexBody> {
    k.project(&e.frame)
}
