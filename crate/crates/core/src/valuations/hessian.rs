use serde::{Deserialize, Serialize};

use super::closed::Comparison;
use crate::convex::ConvexFunction;
use crate::error::{invalid, unsupported, Result};
use super::dual::dual_integral;
use super::smooth::smooth_integral;
use crate::numerics::{binom, integrate_pieces, kappa, Endpoints, Estimate, QuadratureConfig};
use crate::weights::{transform_r_power, WeightFunction};

/// `∫ β(|∇u(x)|) [D²u(x)]_{n-j} dx` for smooth `u` and a radial test weight `β`.
pub fn hessian_measure_integral(u: &ConvexFunction, j: usize, beta: &WeightFunction, cfg: &QuadratureConfig) -> Result<Estimate> {
    if j > u.dim() {
        return invalid("need j <= n");
    }
    if !u.is_twice_differentiable() {
        return unsupported("Hessian measure integral needs a twice differentiable function");
    }
    smooth_integral(u, beta, u.dim() - j, cfg)
}

/// Compares `∫ β(|∇u|) [D²u]_{n-j} dx` with `∫ β(|y|) [D²u*(y)]_j dy`.
pub fn conjugation_pushforward_check(u: &ConvexFunction, j: usize, beta: &WeightFunction, cfg: &QuadratureConfig) -> Result<Comparison> {
    let lhs = hessian_measure_integral(u, j, beta, cfg)?;
    let rhs = dual_integral(&u.conjugate()?, beta, j, cfg)?;
    Ok(Comparison { lhs: lhs.value, rhs: rhs.value, lhs_error: lhs.error, rhs_error: rhs.error })
}

/// Radial profile `φ(r) = scale · r^p / p` with `p > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub p: f64,
    pub scale: f64,
}

impl RadialProfile {
    pub fn new(p: f64, scale: f64) -> Result<Self> {
        if !(p > 1.0 && scale > 0.0) {
            return invalid("radial profile needs p > 1 and scale > 0");
        }
        Ok(Self { p, scale })
    }

    pub fn d1(&self, r: f64) -> f64 {
        self.scale * r.powf(self.p - 1.0)
    }

    pub fn d2(&self, r: f64) -> f64 {
        self.scale * (self.p - 1.0) * r.powf(self.p - 2.0)
    }

    /// Radius where `φ'(r) = s`.
    pub fn radius_of_slope(&self, s: f64) -> f64 {
        (s / self.scale).powf(1.0 / (self.p - 1.0))
    }
}

/// For `u(x) = φ(|x|)`, compares the Hessian-eigenvalue integral
/// `n κ_n ∫ ζ(φ') e_{n-j}(φ'', φ'/r, …) r^{n-1} dr`
/// with the transformed radial integral
/// `n κ_n binom(n-1, n-j) ∫ R^{n-j}ζ(φ') r^{j-1} dr`.
pub fn reilly_radial_check(profile: &RadialProfile, n: usize, j: usize, zeta: &WeightFunction, cfg: &QuadratureConfig) -> Result<Comparison> {
    if !(1 <= j && j <= n) {
        return invalid(format!("need 1 <= j <= n, got j = {j}, n = {n}"));
    }
    let m = n - j;
    let rmax = profile.radius_of_slope(zeta.s_max());
    let mut breaks: Vec<f64> = std::iter::once(0.0)
        .chain(zeta.breakpoints().iter().map(|b| profile.radius_of_slope(*b)))
        .filter(|r| *r <= rmax)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    if breaks.last() != Some(&rmax) {
        breaks.push(rmax);
    }
    let c_d2 = if m >= 1 { binom(n - 1, m - 1) } else { 0.0 };
    let c_d1 = binom(n - 1, m);
    let lhs = integrate_pieces(
        |r| {
            if r <= 0.0 {
                return 0.0;
            }
            let g = profile.d1(r);
            let q = g / r;
            let e = if m >= 1 { profile.d2(r) * c_d2 * q.powi(m as i32 - 1) } else { 0.0 } + c_d1 * q.powi(m as i32);
            zeta.eval(g) * e * r.powi(n as i32 - 1)
        },
        &breaks,
        Endpoints::SingularLower,
        cfg,
    );
    let rz = transform_r_power(zeta, m as u32);
    let rhs = integrate_pieces(|r| if r <= 0.0 { 0.0 } else { rz.eval(profile.d1(r)) * r.powi(j as i32 - 1) }, &breaks, Endpoints::SingularLower, cfg);
    let c = n as f64 * kappa(n);
    Ok(Comparison { lhs: c * lhs.value, rhs: c * c_d1 * rhs.value, lhs_error: c * lhs.error, rhs_error: c * c_d1 * rhs.error })
}
