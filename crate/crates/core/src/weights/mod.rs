//! Weight functions `ζ` on `(0, ∞)` with bounded support, and the integral
//! transform `R^l` together with its inverse.
//!
//! `R^l ζ(s) = s^l ζ(s) + l ∫_s^∞ t^{l-1} ζ(t) dt` for `l > 0` and
//! `R^{-l} ρ(s) = ρ(s)/s^l - l ∫_s^∞ ρ(t)/t^{l+1} dt`.
//! Transforms are kept as unevaluated nodes; limits at zero and singularity
//! descriptors are derived from the net transform power over each base.

mod class;
mod spec;

use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{invalid, Result};
use crate::numerics::quadrature::gauss_fixed;
use crate::numerics::{integrate_pieces, kappa, binom, Endpoints, QuadratureConfig};

pub use class::{nonnegativity_check, HadClass, Membership, NonnegativityVerdict, Singularity};
pub use spec::WeightSpec;

/// Tolerances used for every quadrature inside transform evaluation.
pub(crate) fn transform_quadrature() -> QuadratureConfig {
    QuadratureConfig { abs_tol: 1e-14, rel_tol: 1e-12, ..QuadratureConfig::default() }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind {
    /// `(1 - s/s0)_+`.
    Tent { s0: f64 },
    /// Smooth bump supported on `[a, b]`, peak value one.
    Bump { a: f64, b: f64 },
    /// `ln(1/s)` on `(0, 1)`.
    LogCap,
    /// Polynomial on `(0, cutoff)`, zero beyond.
    PolyCapped { coeffs: Vec<f64>, cutoff: f64 },
    Scaled { inner: WeightFunction, factor: f64 },
    Sum(Vec<WeightFunction>),
    /// `R^power` applied to `inner`; negative powers are inverse transforms.
    TransformOf { inner: WeightFunction, power: i32 },
}

struct CumTable {
    knots: Vec<f64>,
    /// `tail[i] = ∫_{knots[i]}^{knots.last()} t^m w(t) dt`.
    tail: Vec<f64>,
}

struct Node {
    kind: WeightKind,
    support: f64,
    breaks: Vec<f64>,
    tables: RwLock<Vec<(i32, Arc<CumTable>)>>,
}

/// A weight function. Cloning is cheap; nodes are shared.
#[derive(Clone)]
pub struct WeightFunction(Arc<Node>);

impl PartialEq for WeightFunction {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.kind == other.0.kind
    }
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.kind.fmt(f)
    }
}

/// `t^p - s^p` for integer `p` without cancellation when `t ≈ s`.
fn pow_diff(s: f64, t: f64, p: i32) -> f64 {
    match p.cmp(&0) {
        std::cmp::Ordering::Equal => 0.0,
        std::cmp::Ordering::Greater => {
            let mut acc = 0.0;
            for i in 0..p {
                acc += t.powi(i) * s.powi(p - 1 - i);
            }
            (t - s) * acc
        }
        std::cmp::Ordering::Less => -pow_diff(s, t, -p) / (s * t).powi(-p),
    }
}

/// `∫_s^t r^e dr` for `0 ≤ s ≤ t`.
fn power_integral(e: i32, s: f64, t: f64) -> f64 {
    if e == -1 {
        (t / s).ln()
    } else if s == 0.0 {
        if e + 1 > 0 { t.powi(e + 1) / (e + 1) as f64 } else { f64::INFINITY }
    } else {
        pow_diff(s, t, e + 1) / (e + 1) as f64
    }
}

/// Primitive of `-x^m ln x`.
fn log_primitive(m: i32, x: f64) -> f64 {
    if x == 0.0 {
        return if m + 1 > 0 { 0.0 } else { f64::INFINITY };
    }
    let l = x.ln();
    if m == -1 {
        -0.5 * l * l
    } else {
        let k = (m + 1) as f64;
        x.powi(m + 1) * (1.0 / (k * k) - l / k)
    }
}

impl WeightFunction {
    fn from_kind(kind: WeightKind) -> Self {
        let (support, mut breaks) = match &kind {
            WeightKind::Tent { s0 } => (*s0, vec![*s0]),
            WeightKind::Bump { a, b } => (*b, vec![*a, *b]),
            WeightKind::LogCap => (1.0, vec![1.0]),
            WeightKind::PolyCapped { cutoff, .. } => (*cutoff, vec![*cutoff]),
            WeightKind::Scaled { inner, .. } | WeightKind::TransformOf { inner, .. } => (inner.s_max(), inner.breakpoints().to_vec()),
            WeightKind::Sum(terms) => {
                let s = terms.iter().map(|t| t.s_max()).fold(0.0, f64::max);
                let br = terms.iter().flat_map(|t| t.breakpoints().iter().copied()).collect();
                (if terms.is_empty() { 1.0 } else { s }, br)
            }
        };
        breaks.retain(|b| *b > 0.0);
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        Self(Arc::new(Node { kind, support, breaks, tables: RwLock::new(Vec::new()) }))
    }

    pub fn tent(s0: f64) -> Result<Self> {
        if !(s0 > 0.0 && s0.is_finite()) {
            return invalid("tent needs s0 > 0");
        }
        Ok(Self::from_kind(WeightKind::Tent { s0 }))
    }

    pub fn bump(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && b > a && b.is_finite()) {
            return invalid("bump needs 0 <= a < b");
        }
        Ok(Self::from_kind(WeightKind::Bump { a, b }))
    }

    pub fn log_cap() -> Self {
        Self::from_kind(WeightKind::LogCap)
    }

    pub fn poly_capped(coeffs: Vec<f64>, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff.is_finite()) || coeffs.iter().any(|c| !c.is_finite()) {
            return invalid("poly_capped needs finite coefficients and cutoff > 0");
        }
        Ok(Self::from_kind(WeightKind::PolyCapped { coeffs, cutoff }))
    }

    pub fn scaled(inner: Self, factor: f64) -> Self {
        Self::from_kind(WeightKind::Scaled { inner, factor })
    }

    pub fn sum(terms: Vec<Self>) -> Self {
        Self::from_kind(WeightKind::Sum(terms))
    }

    pub fn zero() -> Self {
        Self::sum(Vec::new())
    }

    /// `R^power` of `inner`; power zero returns `inner` itself.
    pub fn transform(inner: Self, power: i32) -> Self {
        if power == 0 {
            inner
        } else {
            Self::from_kind(WeightKind::TransformOf { inner, power })
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.0.kind
    }

    /// Right end of the support.
    pub fn s_max(&self) -> f64 {
        self.0.support
    }

    /// Points in `(0, s_max]` where the function may fail to be smooth.
    pub fn breakpoints(&self) -> &[f64] {
        &self.0.breaks
    }

    /// True when moments have closed forms.
    pub fn is_closed_form(&self) -> bool {
        match &self.0.kind {
            WeightKind::Tent { .. } | WeightKind::LogCap | WeightKind::PolyCapped { .. } => true,
            WeightKind::Scaled { inner, .. } => inner.is_closed_form(),
            WeightKind::Sum(terms) => terms.iter().all(|t| t.is_closed_form()),
            _ => false,
        }
    }

    /// Value at `s`; non-positive arguments return the limit at zero.
    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return self.limit_at_zero().unwrap_or(f64::INFINITY);
        }
        if s >= self.0.support {
            return 0.0;
        }
        match &self.0.kind {
            WeightKind::Tent { s0 } => 1.0 - s / s0,
            WeightKind::Bump { a, b } => {
                if s <= *a {
                    0.0
                } else {
                    let x = (2.0 * s - a - b) / (b - a);
                    let d = 1.0 - x * x;
                    if d <= 0.0 { 0.0 } else { (1.0 - 1.0 / d).exp() }
                }
            }
            WeightKind::LogCap => -s.ln(),
            WeightKind::PolyCapped { coeffs, .. } => coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c),
            WeightKind::Scaled { inner, factor } => factor * inner.eval(s),
            WeightKind::Sum(terms) => terms.iter().map(|t| t.eval(s)).sum(),
            WeightKind::TransformOf { inner, power } => {
                let l = *power;
                let end = self.0.support;
                if l > 0 {
                    s.powi(l) * inner.eval(s) + l as f64 * inner.partial_moment(l - 1, s, end)
                } else {
                    let q = -l;
                    if inner.is_closed_form() {
                        inner.eval(s) / s.powi(q) - q as f64 * inner.partial_moment(-q - 1, s, end)
                    } else {
                        inverse_by_increments(inner, q, s)
                    }
                }
            }
        }
    }

    pub fn eval_many(&self, s: &[f64]) -> Vec<f64> {
        s.iter().map(|&x| self.eval(x)).collect()
    }

    /// `w(t) - w(s)` evaluated without cancellation where a closed form allows.
    pub fn increment(&self, s: f64, t: f64) -> f64 {
        let sup = self.0.support;
        match &self.0.kind {
            WeightKind::Tent { s0 } if s < sup && t < sup => (s - t) / s0,
            WeightKind::PolyCapped { coeffs, .. } if s < sup && t < sup => {
                coeffs.iter().enumerate().map(|(k, c)| c * pow_diff(s, t, k as i32)).sum()
            }
            WeightKind::LogCap if s < sup && t < sup => (s / t).ln(),
            WeightKind::Scaled { inner, factor } => factor * inner.increment(s, t),
            WeightKind::Sum(terms) => terms.iter().map(|w| w.increment(s, t)).sum(),
            WeightKind::TransformOf { inner, power } if *power > 0 && s > 0.0 => {
                let l = *power;
                let head = t.powi(l) * inner.eval(t) - s.powi(l) * inner.eval(s);
                head - l as f64 * inner.partial_moment(l - 1, s.min(t), t.max(s)) * (t - s).signum()
            }
            _ => self.eval(t) - self.eval(s),
        }
    }

    /// `∫_s^t r^m w(r) dr` for `0 ≤ s ≤ t`, with `t` clipped to the support.
    pub fn partial_moment(&self, m: i32, s: f64, t: f64) -> f64 {
        let t = t.min(self.0.support);
        if s >= t {
            return 0.0;
        }
        match &self.0.kind {
            WeightKind::Tent { s0 } => power_integral(m, s, t) - power_integral(m + 1, s, t) / s0,
            WeightKind::PolyCapped { coeffs, .. } => {
                coeffs.iter().enumerate().map(|(k, c)| if *c == 0.0 { 0.0 } else { c * power_integral(m + k as i32, s, t) }).sum()
            }
            WeightKind::LogCap => log_primitive(m, t) - log_primitive(m, s),
            WeightKind::Scaled { inner, factor } => factor * inner.partial_moment(m, s, t),
            WeightKind::Sum(terms) => terms.iter().map(|w| w.partial_moment(m, s, t)).sum(),
            WeightKind::Bump { a, .. } if t <= *a => 0.0,
            _ => {
                if m >= 0 && self.bounded_near_zero() {
                    self.table_moment(m, s, t)
                } else {
                    self.adaptive_moment(m, s, t)
                }
            }
        }
    }

    fn bounded_near_zero(&self) -> bool {
        matches!(self.singularity(), Ok(Singularity::Finite))
    }

    fn adaptive_moment(&self, m: i32, s: f64, t: f64) -> f64 {
        let mut breaks = vec![s];
        if s > 0.0 {
            let mut x = 2.0 * s;
            while x < t {
                breaks.push(x);
                x *= 2.0;
            }
        }
        breaks.extend(self.0.breaks.iter().copied().filter(|b| *b > s && *b < t));
        breaks.push(t);
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        let ends = if s == 0.0 { Endpoints::SingularLower } else { Endpoints::Regular };
        integrate_pieces(|r| r.powi(m) * self.eval(r), &breaks, ends, &transform_quadrature()).value
    }

    fn table(&self, m: i32) -> Arc<CumTable> {
        if let Some((_, t)) = self.0.tables.read().unwrap().iter().find(|(k, _)| *k == m) {
            return t.clone();
        }
        let cfg = transform_quadrature();
        let mut edges = vec![0.0];
        edges.extend(self.0.breaks.iter().copied().filter(|b| *b < self.0.support));
        edges.push(self.0.support);
        let mut knots = Vec::new();
        for w in edges.windows(2) {
            const PER_PIECE: usize = 32;
            for i in 0..PER_PIECE {
                knots.push(w[0] + (w[1] - w[0]) * i as f64 / PER_PIECE as f64);
            }
        }
        knots.push(self.0.support);
        let mut tail = vec![0.0; knots.len()];
        for i in (0..knots.len() - 1).rev() {
            let (a, b) = (knots[i], knots[i + 1]);
            let piece = integrate_pieces(|r| r.powi(m) * self.eval(r), &[a, b], Endpoints::Regular, &cfg).value;
            tail[i] = tail[i + 1] + piece;
        }
        let table = Arc::new(CumTable { knots, tail });
        self.0.tables.write().unwrap().push((m, table.clone()));
        table
    }

    fn table_moment(&self, m: i32, s: f64, t: f64) -> f64 {
        let tab = self.table(m);
        let order = transform_quadrature().order;
        let f = |r: f64| r.powi(m) * self.eval(r);
        let locate = |x: f64| tab.knots.partition_point(|k| *k <= x).saturating_sub(1).min(tab.knots.len() - 2);
        let (i, j) = (locate(s), locate(t));
        if i == j {
            return gauss_fixed(f, s, t, order);
        }
        gauss_fixed(f, s, tab.knots[i + 1], order) + (tab.tail[i + 1] - tab.tail[j]) + gauss_fixed(f, tab.knots[j], t, order)
    }

    /// `lim_{s→0+} w(s)` when it exists and is finite.
    pub fn limit_at_zero(&self) -> Option<f64> {
        limit_with_power(self, 0)
    }

    /// Leading behaviour near zero.
    pub fn singularity(&self) -> Result<Singularity> {
        class::singularity_with_power(self, 0)
    }

    pub fn membership(&self, class: HadClass) -> Result<Membership> {
        class.membership(self)
    }
}

/// `R^{-q} ρ(s) = q ∫_s^S (ρ(s) - ρ(t)) t^{-q-1} dt + ρ(s) S^{-q}`, which avoids
/// the cancellation between `ρ(s)/s^q` and the tail integral.
fn inverse_by_increments(rho: &WeightFunction, q: i32, s: f64) -> f64 {
    let end = rho.s_max();
    let mut breaks = vec![s];
    let mut x = 2.0 * s;
    while x < end {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.extend(rho.breakpoints().iter().copied().filter(|b| *b > s && *b < end));
    breaks.push(end);
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    let qf = q as f64;
    let integral =
        integrate_pieces(|t| -rho.increment(s, t) * t.powi(-q - 1), &breaks, Endpoints::Regular, &transform_quadrature()).value;
    qf * integral + rho.eval(s) * end.powi(-q)
}

fn limit_with_power(w: &WeightFunction, net: i32) -> Option<f64> {
    match &w.0.kind {
        WeightKind::TransformOf { inner, power } => limit_with_power(inner, net + power),
        WeightKind::Scaled { inner, factor } => {
            if *factor == 0.0 { Some(0.0) } else { limit_with_power(inner, net).map(|v| v * factor) }
        }
        WeightKind::Sum(terms) => terms.iter().map(|t| limit_with_power(t, net)).sum(),
        _ if net == 0 => match &w.0.kind {
            WeightKind::Tent { .. } => Some(1.0),
            WeightKind::Bump { a, .. } => Some(if *a > 0.0 { 0.0 } else { w.eval(f64::MIN_POSITIVE) }),
            WeightKind::PolyCapped { coeffs, .. } => Some(coeffs.first().copied().unwrap_or(0.0)),
            _ => None,
        },
        _ if net > 0 => {
            // s^net w(s) -> 0 whenever the moment below converges
            match class::singularity_with_power(w, 0) {
                Ok(Singularity::Finite) | Ok(Singularity::Log { .. }) => {
                    Some(net as f64 * w.partial_moment(net - 1, 0.0, w.s_max()))
                }
                _ => None,
            }
        }
        _ => {
            let q = -net;
            match &w.0.kind {
                WeightKind::Bump { a, b } if *a > 0.0 => {
                    Some(-(q as f64) * integrate_pieces(|t| t.powi(-q - 1) * w.eval(t), &[*a, *b], Endpoints::Regular, &transform_quadrature()).value)
                }
                WeightKind::PolyCapped { coeffs, cutoff } => poly_inverse_limit(coeffs, *cutoff, q),
                WeightKind::Tent { s0 } => poly_inverse_limit(&[1.0, -1.0 / s0], *s0, q),
                _ => None,
            }
        }
    }
}

/// Limit of `R^{-q} p` at zero, finite only when `a_m = 0` for `1 ≤ m ≤ q`.
fn poly_inverse_limit(coeffs: &[f64], c: f64, q: i32) -> Option<f64> {
    let q_us = q as usize;
    if coeffs.iter().enumerate().any(|(m, a)| m >= 1 && m <= q_us && *a != 0.0) {
        return None;
    }
    let a0 = coeffs.first().copied().unwrap_or(0.0);
    let mut v = a0 * c.powi(-q);
    for (m, a) in coeffs.iter().enumerate().skip(q_us + 1) {
        let e = m as i32 - q;
        v -= q as f64 * a * c.powi(e) / e as f64;
    }
    Some(v)
}

/// `R ζ`.
pub fn transform_r(zeta: &WeightFunction) -> WeightFunction {
    WeightFunction::transform(zeta.clone(), 1)
}

/// `R^l ζ` for `l ≥ 0`.
pub fn transform_r_power(zeta: &WeightFunction, l: u32) -> WeightFunction {
    WeightFunction::transform(zeta.clone(), l as i32)
}

/// `R^{-l} ρ` for `l ≥ 1`.
pub fn transform_r_inverse(rho: &WeightFunction, l: u32) -> Result<WeightFunction> {
    if l == 0 {
        return invalid("inverse transform needs l >= 1");
    }
    Ok(WeightFunction::transform(rho.clone(), -(l as i32)))
}

/// `α = κ_{n-j} R^{n-j} ζ`, the weight of the domain-gradient integral.
pub fn alpha_from_zeta(zeta: &WeightFunction, j: usize, n: usize) -> Result<WeightFunction> {
    if j > n {
        return invalid("alpha needs j <= n");
    }
    Ok(WeightFunction::scaled(transform_r_power(zeta, (n - j) as u32), kappa(n - j)))
}

/// `ξ = κ_{n-k} / binom(n-j, k-j) · R^{n-k} ζ`, the weight on `k`-dimensional projections.
pub fn xi_from_zeta(zeta: &WeightFunction, j: usize, k: usize, n: usize) -> Result<WeightFunction> {
    if !(j <= k && k <= n) {
        return invalid("xi needs j <= k <= n");
    }
    let c = kappa(n - k) / binom(n - j, k - j);
    Ok(WeightFunction::scaled(transform_r_power(zeta, (n - k) as u32), c))
}
