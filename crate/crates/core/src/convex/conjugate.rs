use super::body::ConvexBody;
use super::function::ConvexFunction;
use crate::error::{unsupported, Result};
use crate::numerics::linalg::{dot, scale};

/// Collapses `Sum(Quadratic, Quadratic)` into a single quadratic.
pub(crate) fn collapse_quadratic_sum(f: &ConvexFunction) -> Result<ConvexFunction> {
    match f {
        ConvexFunction::Sum { left, right } => match (left.as_ref(), right.as_ref()) {
            (ConvexFunction::Quadratic { a: a1, b: b1, c: c1 }, ConvexFunction::Quadratic { a: a2, b: b2, c: c2 }) => {
                ConvexFunction::quadratic(a1.add(a2), b1.iter().zip(b2).map(|(x, y)| x + y).collect(), c1 + c2)
            }
            _ => unsupported("sum is not of two quadratics"),
        },
        other => Ok(other.clone()),
    }
}

impl ConvexFunction {
    /// Legendre–Fenchel conjugate in closed form.
    pub fn conjugate(&self) -> Result<ConvexFunction> {
        match self {
            ConvexFunction::Quadratic { a, b, c } => {
                let inv = a.inverse()?;
                let ib = inv.mul_vec(b);
                Ok(ConvexFunction::Quadratic { a: inv, b: scale(&ib, -1.0), c: 0.5 * dot(b, &ib) - c })
            }
            ConvexFunction::RadialPower { n, p, scale: s } => {
                let q = p / (p - 1.0);
                Ok(ConvexFunction::RadialPower { n: *n, p: q, scale: s.powf(1.0 - q) })
            }
            ConvexFunction::Cone { n, t, r } => Ok(ConvexFunction::RadialMaxAffine { n: *n, slopes: vec![0.0, *r], offsets: vec![0.0, -r * t] }),
            ConvexFunction::RadialMaxAffine { n, slopes, offsets } => {
                let mut pieces: Vec<(f64, f64)> = slopes.iter().copied().zip(offsets.iter().copied()).collect();
                pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
                match pieces.as_slice() {
                    [(r, b)] if *r > 0.0 && *b == 0.0 => Ok(ConvexFunction::Indicator(ConvexBody::Ball { center: vec![0.0; *n], radius: *r })),
                    [(z, b0), (r, b1)] if *z == 0.0 && *b0 == 0.0 && *r > 0.0 && *b1 <= 0.0 => {
                        ConvexFunction::cone(*n, -b1 / r, *r)
                    }
                    _ => unsupported("conjugate of a general radial max-affine function"),
                }
            }
            ConvexFunction::Indicator(k) => Ok(ConvexFunction::Support(k.clone())),
            ConvexFunction::Support(k) => Ok(ConvexFunction::Indicator(k.clone())),
            ConvexFunction::MaxAffine { .. } => unsupported("conjugate of a max-affine function"),
            ConvexFunction::EpiTranslated { inner, x0, alpha } => inner.conjugate()?.plus_affine(x0.clone(), -alpha),
            ConvexFunction::PlusAffine { inner, slope, offset } => inner.conjugate()?.epi_translate(slope.clone(), -offset),
            ConvexFunction::Rotated { inner, q } => inner.conjugate()?.rotate(q.clone()),
            ConvexFunction::EpiScaled { inner, lambda } => inner.conjugate()?.scale_by(*lambda),
            ConvexFunction::Scaled { inner, factor } => inner.conjugate()?.epi_scale(*factor),
            ConvexFunction::InfConv { left, right } => left.conjugate()?.sum(right.conjugate()?),
            ConvexFunction::Sum { left, right } => {
                if let Ok(q @ ConvexFunction::Quadratic { .. }) = collapse_quadratic_sum(self) {
                    return q.conjugate();
                }
                left.conjugate()?.inf_conv(right.conjugate()?)
            }
        }
    }
}
