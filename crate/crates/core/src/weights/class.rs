use serde::{Deserialize, Serialize};

use super::{WeightFunction, WeightKind};
use crate::error::{Error, Result};
use crate::numerics::log_grid;

/// Leading behaviour of a weight near zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Singularity {
    /// Bounded with a finite limit.
    Finite,
    /// `coeff · ln(1/s)`.
    Log { coeff: f64 },
    /// `coeff · s^exponent` with `exponent < 0`.
    Power { exponent: f64, coeff: f64 },
}

impl Singularity {
    /// Larger is more singular.
    fn severity(&self) -> f64 {
        match self {
            Singularity::Finite => 0.0,
            Singularity::Log { .. } => 0.5,
            Singularity::Power { exponent, .. } => 1.0 - exponent,
        }
    }

    fn coeff(&self) -> f64 {
        match self {
            Singularity::Finite => 0.0,
            Singularity::Log { coeff } | Singularity::Power { coeff, .. } => *coeff,
        }
    }

    fn with_coeff(self, c: f64) -> Self {
        match self {
            Singularity::Finite => Singularity::Finite,
            Singularity::Log { .. } => Singularity::Log { coeff: c },
            Singularity::Power { exponent, .. } => Singularity::Power { exponent, coeff: c },
        }
    }
}

pub(super) fn singularity_with_power(w: &WeightFunction, net: i32) -> Result<Singularity> {
    match w.kind() {
        WeightKind::TransformOf { inner, power } => singularity_with_power(inner, net + power),
        WeightKind::Scaled { inner, factor } => {
            if *factor == 0.0 {
                return Ok(Singularity::Finite);
            }
            let s = singularity_with_power(inner, net)?;
            Ok(s.with_coeff(s.coeff() * factor))
        }
        WeightKind::Sum(terms) => {
            let parts = terms.iter().map(|t| singularity_with_power(t, net)).collect::<Result<Vec<_>>>()?;
            let worst = parts.iter().map(Singularity::severity).fold(0.0, f64::max);
            if worst == 0.0 {
                return Ok(Singularity::Finite);
            }
            let leading: Vec<&Singularity> = parts.iter().filter(|p| p.severity() == worst).collect();
            let total: f64 = leading.iter().map(|p| p.coeff()).sum();
            let scale = leading.iter().map(|p| p.coeff().abs()).fold(0.0, f64::max);
            if total.abs() <= 1e-12 * scale {
                return Err(Error::UnknownSingularity("leading singular terms cancel".into()));
            }
            Ok(leading[0].with_coeff(total))
        }
        WeightKind::Bump { .. } => Ok(Singularity::Finite),
        WeightKind::Tent { s0 } => Ok(poly_singularity(&[1.0, -1.0 / s0], net)),
        WeightKind::PolyCapped { coeffs, .. } => Ok(poly_singularity(coeffs, net)),
        WeightKind::LogCap => Ok(match net {
            0 => Singularity::Log { coeff: 1.0 },
            n if n > 0 => Singularity::Finite,
            n => Singularity::Power { exponent: n as f64, coeff: 1.0 / (-n) as f64 },
        }),
    }
}

/// `R^{-q}` of a polynomial near zero: the smallest `m ≥ 1` with `a_m ≠ 0`
/// gives `s^{m-q}` when `m < q` and `ln(1/s)` when `m = q`.
fn poly_singularity(coeffs: &[f64], net: i32) -> Singularity {
    if net >= 0 {
        return Singularity::Finite;
    }
    let q = -net;
    for (m, &a) in coeffs.iter().enumerate().skip(1) {
        let m = m as i32;
        if m > q {
            break;
        }
        if a != 0.0 {
            return if m < q {
                Singularity::Power { exponent: (m - q) as f64, coeff: -a * m as f64 / (q - m) as f64 }
            } else {
                Singularity::Log { coeff: -(q as f64) * a }
            };
        }
    }
    Singularity::Finite
}

/// The class `Had_j^n` of weights admissible for `Z_{j,ζ}` on `R^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HadClass {
    pub j: usize,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub singularity: Singularity,
    pub reason: String,
}

impl HadClass {
    pub fn new(j: usize, n: usize) -> Self {
        Self { j, n }
    }

    pub fn membership(&self, zeta: &WeightFunction) -> Result<Membership> {
        if self.j > self.n {
            return Err(Error::InvalidInput(format!("j = {} exceeds n = {}", self.j, self.n)));
        }
        let sing = zeta.singularity()?;
        // Had_0^0 is identified with Had_1^1
        let codim = self.n - self.j;
        let (member, reason) = match sing {
            Singularity::Finite => (true, "finite limit at zero".to_string()),
            _ if codim == 0 => (false, "a finite limit at zero is required when j = n".to_string()),
            Singularity::Log { .. } => (true, "logarithmic singularity is integrable".to_string()),
            Singularity::Power { exponent, .. } => {
                let ok = exponent > -(codim as f64);
                let reason = if ok {
                    format!("power {exponent} exceeds -(n-j) = -{codim}")
                } else {
                    format!("power {exponent} is not above -(n-j) = -{codim}")
                };
                (ok, reason)
            }
        };
        Ok(Membership { member, singularity: sing, reason })
    }

    pub fn contains(&self, zeta: &WeightFunction) -> Result<bool> {
        Ok(self.membership(zeta)?.member)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonnegativityVerdict {
    pub nonnegative: bool,
    pub min_value: f64,
    pub argmin: f64,
}

/// Sign condition for `Z_{j,ζ}` to be non-negative: `R^{n-j} ζ ≥ 0` for
/// `1 ≤ j ≤ n-1`, `ζ ≥ 0` for `j = n`, and `R^n ζ(0) ≥ 0` for `j = 0`.
pub fn nonnegativity_check(zeta: &WeightFunction, j: usize, n: usize, grid_size: usize) -> Result<NonnegativityVerdict> {
    if j > n {
        return Err(Error::InvalidInput("j exceeds n".into()));
    }
    if j == 0 {
        let v = WeightFunction::transform(zeta.clone(), n as i32)
            .limit_at_zero()
            .ok_or_else(|| Error::UnknownSingularity("R^n ζ has no limit at zero".into()))?;
        return Ok(NonnegativityVerdict { nonnegative: v >= 0.0, min_value: v, argmin: 0.0 });
    }
    let rho = WeightFunction::transform(zeta.clone(), (n - j) as i32);
    let smax = rho.s_max();
    let mut grid = log_grid(smax * 1e-6, smax, grid_size.max(2));
    for b in rho.breakpoints() {
        grid.push(b * (1.0 - 1e-9));
    }
    let mut best = (f64::INFINITY, 0.0);
    if let Some(v) = rho.limit_at_zero() {
        best = (v, 0.0);
    }
    for s in grid {
        let v = rho.eval(s);
        if v < best.0 {
            best = (v, s);
        }
    }
    Ok(NonnegativityVerdict { nonnegative: best.0 >= -1e-12, min_value: best.0, argmin: best.1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tent_inverse_descriptors() {
        let t = WeightFunction::tent(1.0).unwrap();
        let r1 = WeightFunction::transform(t.clone(), -1);
        assert_eq!(r1.singularity().unwrap(), Singularity::Log { coeff: 1.0 });
        let r2 = WeightFunction::transform(t, -2);
        assert_eq!(r2.singularity().unwrap(), Singularity::Power { exponent: -1.0, coeff: 1.0 });
    }

    #[test]
    fn membership_thresholds() {
        let r2 = WeightFunction::transform(WeightFunction::tent(1.0).unwrap(), -2);
        assert!(HadClass::new(0, 2).contains(&r2).unwrap());
        assert!(!HadClass::new(1, 2).contains(&r2).unwrap());
        let lc = WeightFunction::log_cap();
        assert!(HadClass::new(1, 2).contains(&lc).unwrap());
        assert!(!HadClass::new(2, 2).contains(&lc).unwrap());
    }

    #[test]
    fn cancelling_sum_is_reported() {
        let lc = WeightFunction::log_cap();
        let s = WeightFunction::sum(vec![lc.clone(), WeightFunction::scaled(lc, -1.0)]);
        assert!(matches!(s.singularity(), Err(Error::UnknownSingularity(_))));
    }

    #[test]
    fn sign_conditions() {
        let p = WeightFunction::poly_capped(vec![1.0, -2.0], 1.0).unwrap();
        assert!(!nonnegativity_check(&p, 2, 2, 200).unwrap().nonnegative);
        let t = WeightFunction::tent(1.0).unwrap();
        assert!(nonnegativity_check(&t, 1, 3, 200).unwrap().nonnegative);
        assert!(nonnegativity_check(&t, 0, 2, 200).unwrap().nonnegative);
    }
}
