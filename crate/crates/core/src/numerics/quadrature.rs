//! Adaptive Gauss–Legendre quadrature in one dimension and nested over boxes.
//!
//! Panels carry the difference between the order-`N` rule and a lower-order
//! rule as their error estimate. The panel with the largest estimate is split
//! until the total estimate meets `max(abs_tol, rel_tol * |value|)`.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use nalgebra::DMatrix;

use super::linalg::SymMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub order: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { order: 31, abs_tol: 1e-10, rel_tol: 1e-9, max_depth: 40, max_panels: 4000 }
    }
}

impl QuadratureConfig {
    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Integral estimate with its error bound and evaluation count.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
    pub converged: bool,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0, evaluations: 0, converged: true }
    }

    pub fn scaled(self, f: f64) -> Self {
        Self { value: self.value * f, error: self.error * f.abs(), ..self }
    }

    pub fn plus(self, other: Estimate) -> Self {
        Self {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    /// Converts an unconverged estimate into [`Error::NonConverged`].
    pub fn checked(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConverged { estimate: self.value, error_estimate: self.error })
        }
    }
}

struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

const MAX_ORDER: usize = 128;
static RULES: [OnceLock<GaussRule>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];

fn gauss_rule(order: usize) -> &'static GaussRule {
    let order = order.clamp(1, MAX_ORDER);
    RULES[order].get_or_init(|| legendre_rule(order))
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn legendre_rule(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

/// Fixed-order Gauss–Legendre rule on `[a, b]`.
pub fn gauss_fixed<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, order: usize) -> f64 {
    let rule = gauss_rule(order);
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * f(m + h * x);
    }
    acc * h
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    inner_err: f64,
    depth: u32,
}

struct HeapEntry(f64, usize);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn eval_panel<F: FnMut(f64) -> (f64, f64)>(f: &mut F, a: f64, b: f64, depth: u32, order: usize, evals: &mut u64) -> Panel {
    let hi = gauss_rule(order);
    let lo = gauss_rule((order / 2).max(1));
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let (mut vh, mut eh, mut vl, mut mag) = (0.0, 0.0, 0.0, 0.0);
    for (x, w) in hi.nodes.iter().zip(&hi.weights) {
        let (v, e) = f(m + h * x);
        vh += w * v;
        eh += w * e.abs();
        mag += w * v.abs();
    }
    for (x, w) in lo.nodes.iter().zip(&lo.weights) {
        vl += w * f(m + h * x).0;
    }
    *evals += (hi.nodes.len() + lo.nodes.len()) as u64;
    let value = vh * h;
    // roundoff floor
    let mut err = ((vh - vl) * h).abs().max(50.0 * f64::EPSILON * mag * h.abs());
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    Panel { a, b, value, err, inner_err: eh * h.abs(), depth }
}

/// How the endpoints of an interval are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Endpoints {
    #[default]
    Regular,
    /// Geometric refinement with ratio 1/2 toward the lower limit.
    SingularLower,
    /// Geometric refinement with ratio 1/2 toward the upper limit.
    SingularUpper,
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Estimate {
    integrate_nested(|x| (f(x), 0.0), &[a, b], Endpoints::Regular, cfg)
}

/// Integrates `f` over the sorted breakpoints `breaks`, first to last.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], ends: Endpoints, cfg: &QuadratureConfig) -> Estimate {
    integrate_nested(|x| (f(x), 0.0), breaks, ends, cfg)
}

/// Integrates an integrand that reports its own error (a nested integral),
/// adding that error to the returned bound.
pub fn integrate_nested<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    breaks: &[f64],
    ends: Endpoints,
    cfg: &QuadratureConfig,
) -> Estimate {
    let mut evals = 0u64;
    let mut panels: Vec<Panel> = Vec::new();
    let mut tail_value = 0.0;
    let nb = breaks.len();
    if nb < 2 {
        return Estimate::exact(0.0);
    }
    if breaks[nb - 1] == breaks[0] {
        return Estimate::exact(0.0);
    }
    for w in 0..nb - 1 {
        let (a, b) = (breaks[w], breaks[w + 1]);
        if a == b {
            continue;
        }
        let singular_lo = ends == Endpoints::SingularLower && w == 0;
        let singular_hi = ends == Endpoints::SingularUpper && w == nb - 2;
        if singular_lo || singular_hi {
            let (anchor, far) = if singular_lo { (a, b) } else { (b, a) };
            let mut width = far - anchor;
            let mut i = 0;
            loop {
                let near = anchor + 0.5 * width;
                let (pa, pb) = if singular_lo { (near, anchor + width) } else { (anchor + width, near) };
                let p = eval_panel(&mut f, pa, pb, 0, cfg.order, &mut evals);
                let small = p.value.abs() < 0.1 * cfg.tolerance(tail_value);
                tail_value += p.value;
                panels.push(p);
                width *= 0.5;
                i += 1;
                if (i >= 4 && small) || i >= 400 || width.abs() < f64::MIN_POSITIVE * 1e10 {
                    // the innermost piece touches the singular end; Gauss nodes avoid it
                    let (pa, pb) = if singular_lo { (anchor, anchor + width) } else { (anchor + width, anchor) };
                    panels.push(eval_panel(&mut f, pa, pb, 0, cfg.order, &mut evals));
                    break;
                }
            }
        } else {
            panels.push(eval_panel(&mut f, a, b, 0, cfg.order, &mut evals));
        }
    }
    let mut heap: BinaryHeap<HeapEntry> = panels.iter().enumerate().map(|(i, p)| HeapEntry(p.err, i)).collect();
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum::<f64>();
        if err <= cfg.tolerance(value) {
            break;
        }
        let Some(HeapEntry(_, idx)) = heap.pop() else { break };
        let p = panels[idx];
        let mid = 0.5 * (p.a + p.b);
        if p.depth >= cfg.max_depth || panels.len() >= cfg.max_panels || mid == p.a || mid == p.b {
            continue;
        }
        let left = eval_panel(&mut f, p.a, mid, p.depth + 1, cfg.order, &mut evals);
        let right = eval_panel(&mut f, mid, p.b, p.depth + 1, cfg.order, &mut evals);
        panels[idx] = left;
        heap.push(HeapEntry(left.err, idx));
        panels.push(right);
        heap.push(HeapEntry(right.err, panels.len() - 1));
    }
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let err: f64 = panels.iter().map(|p| p.err).sum::<f64>();
    let inner: f64 = panels.iter().map(|p| p.inner_err).sum();
    Estimate { value, error: err + inner, evaluations: evals, converged: err <= cfg.tolerance(value) && value.is_finite() }
}

/// Ellipsoids `(x - center)ᵀ shape (x - center) = r²` whose crossings of each
/// integration line become breakpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadric {
    pub center: Vec<f64>,
    pub shape: SymMatrix,
    pub radii: Vec<f64>,
}

/// Structural hints for box integration.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoxHints {
    pub quadrics: Vec<Quadric>,
    /// A point where the integrand may be singular; each axis is split there.
    pub singular_point: Option<Vec<f64>>,
}

/// Schur complements of a quadric on the leading coordinates `0..=i`.
struct QuadricSlices {
    center: Vec<f64>,
    radii: Vec<f64>,
    schur: Vec<SymMatrix>,
}

impl QuadricSlices {
    fn new(q: &Quadric) -> Self {
        let d = q.shape.dim();
        let m = q.shape.to_dmatrix();
        let mut schur = Vec::with_capacity(d);
        for i in 0..d {
            let lead = i + 1;
            if lead == d {
                schur.push(q.shape.clone());
                continue;
            }
            let a = m.view((0, 0), (lead, lead)).into_owned();
            let b = m.view((0, lead), (lead, d - lead)).into_owned();
            let c = m.view((lead, lead), (d - lead, d - lead)).into_owned();
            let s = match c.clone().try_inverse() {
                Some(ci) => a - &b * ci * b.transpose(),
                None => a,
            };
            schur.push(SymMatrix::from_dmatrix(&s));
        }
        Self { center: q.center.clone(), radii: q.radii.clone(), schur }
    }

    fn breaks(&self, axis: usize, prefix: &[f64], out: &mut Vec<f64>) {
        let s = &self.schur[axis];
        let sii = s.get(axis, axis);
        if sii <= 0.0 {
            return;
        }
        let mut bcoef = 0.0;
        let mut ccoef = 0.0;
        for p in 0..axis {
            let yp = prefix[p] - self.center[p];
            bcoef += s.get(axis, p) * yp;
            for q in 0..axis {
                ccoef += s.get(p, q) * yp * (prefix[q] - self.center[q]);
            }
        }
        let c = self.center[axis];
        out.push(c - bcoef / sii);
        for &r in &self.radii {
            let disc = bcoef * bcoef - sii * (ccoef - r * r);
            if disc > 0.0 {
                let sq = disc.sqrt();
                out.push(c + (-bcoef - sq) / sii);
                out.push(c + (-bcoef + sq) / sii);
            }
        }
    }
}

struct BoxIntegrator<'a, F> {
    f: &'a F,
    lo: &'a [f64],
    hi: &'a [f64],
    slices: Vec<QuadricSlices>,
    singular: Option<&'a [f64]>,
    cfgs: Vec<QuadratureConfig>,
    evals: Cell<u64>,
}

impl<F: Fn(&[f64]) -> f64> BoxIntegrator<'_, F> {
    fn level(&self, axis: usize, prefix: &mut Vec<f64>) -> Estimate {
        let d = self.lo.len();
        let (a, b) = (self.lo[axis], self.hi[axis]);
        let mut breaks = vec![a, b];
        for s in &self.slices {
            s.breaks(axis, prefix, &mut breaks);
        }
        if let Some(p) = self.singular {
            breaks.push(p[axis]);
        }
        breaks.retain(|x| x.is_finite() && *x >= a && *x <= b);
        breaks.sort_by(|x, y| x.total_cmp(y));
        let tol = 1e-13 * (b - a).abs().max(1e-300);
        breaks.dedup_by(|x, y| (*x - *y).abs() <= tol);
        *breaks.last_mut().unwrap() = b;
        breaks[0] = a;
        
        integrate_nested(
            |t| {
                prefix[axis] = t;
                if axis + 1 == d {
                    self.evals.set(self.evals.get() + 1);
                    ((self.f)(prefix), 0.0)
                } else {
                    let e = self.level(axis + 1, prefix);
                    (e.value, e.error)
                }
            },
            &breaks,
            Endpoints::Regular,
            &self.cfgs[axis],
        )
    }
}

/// Integrates `f` over the box `[lo, hi]` by nested adaptive quadrature,
/// splitting each line at the hint surfaces and the singular point.
pub fn integrate_box<F: Fn(&[f64]) -> f64>(f: &F, lo: &[f64], hi: &[f64], hints: &BoxHints, cfg: &QuadratureConfig) -> Estimate {
    let d = lo.len();
    assert_eq!(d, hi.len());
    if d == 0 {
        return Estimate { value: f(&[]), error: 0.0, evaluations: 1, converged: true };
    }
    let lengths: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a).abs()).collect();
    // inner tolerances shrink by the measure of the enclosing outer box
    let cfgs: Vec<QuadratureConfig> = (0..d)
        .map(|axis| {
            let outer: f64 = lengths[..axis].iter().product();
            cfg.with_tolerances(cfg.abs_tol / outer.max(1e-300) / d as f64, cfg.rel_tol / d as f64)
        })
        .collect();
    let integrator = BoxIntegrator {
        f,
        lo,
        hi,
        slices: hints.quadrics.iter().filter(|q| q.shape.dim() == d).map(QuadricSlices::new).collect(),
        singular: hints.singular_point.as_deref(),
        cfgs,
        evals: Cell::new(0),
    };
    let mut prefix = vec![0.0; d];
    let est = integrator.level(0, &mut prefix);
    let converged = est.value.is_finite() && est.error <= (d as f64 + 1.0) * cfg.tolerance(est.value);
    Estimate { value: est.value, error: est.error, evaluations: integrator.evals.get(), converged }
}

struct PolarIntegrator<'a, F> {
    f: &'a F,
    center: &'a [f64],
    map: DMatrix<f64>,
    radial: Vec<f64>,
    cfgs: Vec<QuadratureConfig>,
    evals: Cell<u64>,
}

impl<F: Fn(&[f64]) -> f64> PolarIntegrator<'_, F> {
    fn radial(&self, omega: &[f64]) -> Estimate {
        let d = omega.len();
        let dir = self.map.clone() * nalgebra::DVector::from_column_slice(omega);
        let mut x = vec![0.0; d];
        
        integrate_pieces(
            |rho| {
                for i in 0..d {
                    x[i] = self.center[i] + rho * dir[i];
                }
                self.evals.set(self.evals.get() + 1);
                let v = (self.f)(&x);
                if v == 0.0 { 0.0 } else { v * rho.powi(d as i32 - 1) }
            },
            &self.radial,
            Endpoints::SingularLower,
            &self.cfgs[d - 1],
        )
    }

    /// Hyperspherical angles `φ_0..φ_{d-2}`; the last one runs over `[0, 2π]`.
    fn level(&self, axis: usize, angles: &mut Vec<f64>) -> Estimate {
        let d = angles.len() + 1;
        let last = axis + 2 == d;
        let top = if last { 2.0 * std::f64::consts::PI } else { std::f64::consts::PI };
        let power = (d - 2 - axis) as i32;
        let breaks = if last { vec![0.0, 0.5 * top, top] } else { vec![0.0, top] };
        integrate_nested(
            |phi| {
                angles[axis] = phi;
                let w = phi.sin().powi(power);
                let e = if last {
                    let mut omega = vec![0.0; d];
                    let mut prod = 1.0;
                    for (i, a) in angles.iter().enumerate() {
                        omega[i] = prod * a.cos();
                        prod *= a.sin();
                    }
                    omega[d - 1] = prod;
                    self.radial(&omega)
                } else {
                    self.level(axis + 1, angles)
                };
                (w * e.value, w.abs() * e.error)
            },
            &breaks,
            Endpoints::Regular,
            &self.cfgs[axis],
        )
    }
}

/// Integrates `f` over the ellipsoid `(x - c)ᵀ M (x - c) ≤ r_max²` in polar
/// coordinates `x = c + ρ L^{-T} ω` with `M = L Lᵀ`. The radial lines are
/// split at `radial_breaks`, and refined geometrically toward the centre.
pub fn integrate_ellipsoid<F: Fn(&[f64]) -> f64>(
    f: &F,
    center: &[f64],
    shape: &SymMatrix,
    r_max: f64,
    radial_breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let d = center.len();
    if shape.dim() != d || d == 0 {
        return Err(Error::InvalidInput("ellipsoid shape and centre dimensions differ".into()));
    }
    if !(r_max > 0.0) {
        return Ok(Estimate::exact(0.0));
    }
    let chol = shape
        .to_dmatrix()
        .cholesky()
        .ok_or_else(|| Error::InvalidInput("ellipsoid shape is not positive definite".into()))?;
    let l = chol.l();
    let jac: f64 = 1.0 / l.diagonal().iter().product::<f64>();
    let linv = l.solve_lower_triangular(&DMatrix::identity(d, d)).ok_or_else(|| Error::InvalidInput("singular shape".into()))?;
    let mut radial: Vec<f64> = std::iter::once(0.0).chain(radial_breaks.iter().copied().filter(|r| *r > 0.0 && *r < r_max)).collect();
    radial.sort_by(f64::total_cmp);
    radial.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * r_max);
    radial.push(r_max);
    let cfgs: Vec<QuadratureConfig> = (0..d)
        .map(|axis| {
            let outer = if axis == 0 { 1.0 } else { std::f64::consts::PI.powi(axis as i32) };
            cfg.with_tolerances(cfg.abs_tol / jac / outer / d as f64, cfg.rel_tol / d as f64)
        })
        .collect();
    let pi = PolarIntegrator { f, center, map: linv.transpose(), radial, cfgs, evals: Cell::new(0) };
    let est = if d == 1 {
        pi.radial(&[1.0]).plus(pi.radial(&[-1.0]))
    } else {
        let mut angles = vec![0.0; d - 1];
        pi.level(0, &mut angles)
    };
    let est = est.scaled(jac);
    let converged = est.value.is_finite() && est.error <= (d as f64 + 1.0) * cfg.tolerance(est.value);
    Ok(Estimate { value: est.value, error: est.error, evaluations: pi.evals.get(), converged })
}
