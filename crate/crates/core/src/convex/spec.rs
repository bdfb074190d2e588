use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::body::ConvexBody;
use super::function::ConvexFunction;
use crate::error::{Error, Result};
use crate::numerics::SymMatrix;

/// JSON form of a convex body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball { r: f64, center: Vec<f64> },
    Box { intervals: Vec<[f64; 2]> },
    Polytope { vertices: Vec<Vec<f64>> },
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Ball { r, center } => ConvexBody::ball(center.clone(), *r),
            BodySpec::Box { intervals } => ConvexBody::cuboid(&intervals.iter().map(|i| (i[0], i[1])).collect::<Vec<_>>()),
            BodySpec::Polytope { vertices } => ConvexBody::polytope(vertices),
        }
    }
}

impl From<&ConvexBody> for BodySpec {
    fn from(k: &ConvexBody) -> Self {
        match k {
            ConvexBody::Ball { center, radius } => BodySpec::Ball { r: *radius, center: center.clone() },
            ConvexBody::Box { lo, hi } => BodySpec::Box { intervals: lo.iter().zip(hi).map(|(a, b)| [*a, *b]).collect() },
            ConvexBody::Polytope(h) => BodySpec::Polytope { vertices: h.vertices.clone() },
        }
    }
}

/// JSON form of a convex function. Radial variants carry their dimension `n`,
/// which may be omitted when the surrounding context fixes it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Quadratic {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(default)]
        b: Option<Vec<f64>>,
        #[serde(default)]
        c: f64,
    },
    RadialPower {
        p: f64,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        n: Option<usize>,
    },
    Cone {
        t: f64,
        r: f64,
        #[serde(default)]
        n: Option<usize>,
    },
    Indicator { body: BodySpec },
    Support { body: BodySpec },
    MaxAffine {
        slopes: Vec<Vec<f64>>,
        offsets: Vec<f64>,
        #[serde(default)]
        domain: Option<BodySpec>,
    },
    RadialMaxAffine {
        slopes: Vec<f64>,
        offsets: Vec<f64>,
        #[serde(default)]
        n: Option<usize>,
    },
    EpiTranslate { x0: Vec<f64>, alpha: f64, inner: Box<FunctionSpec> },
    Rotate {
        #[serde(rename = "Q")]
        q: Vec<Vec<f64>>,
        inner: Box<FunctionSpec>,
    },
    EpiScale { lambda: f64, inner: Box<FunctionSpec> },
    Scale { factor: f64, inner: Box<FunctionSpec> },
    PlusAffine { slope: Vec<f64>, offset: f64, inner: Box<FunctionSpec> },
    InfConv { left: Box<FunctionSpec>, right: Box<FunctionSpec> },
    Sum { left: Box<FunctionSpec>, right: Box<FunctionSpec> },
}

fn one() -> f64 {
    1.0
}

fn need_n(n: Option<usize>, hint: Option<usize>) -> Result<usize> {
    n.or(hint).ok_or_else(|| Error::Schema("radial function needs a dimension `n`".into()))
}

impl FunctionSpec {
    pub fn build(&self) -> Result<ConvexFunction> {
        self.build_with(None)
    }

    /// Builds with a dimension hint for radial variants lacking `n`.
    pub fn build_with(&self, hint: Option<usize>) -> Result<ConvexFunction> {
        match self {
            FunctionSpec::Quadratic { a, b, c } => {
                let a = SymMatrix::from_rows(a)?;
                let b = b.clone().unwrap_or_else(|| vec![0.0; a.dim()]);
                ConvexFunction::quadratic(a, b, *c)
            }
            FunctionSpec::RadialPower { p, scale, n } => ConvexFunction::radial_power(need_n(*n, hint)?, *p, *scale),
            FunctionSpec::Cone { t, r, n } => ConvexFunction::cone(need_n(*n, hint)?, *t, *r),
            FunctionSpec::Indicator { body } => Ok(ConvexFunction::Indicator(body.build()?)),
            FunctionSpec::Support { body } => Ok(ConvexFunction::Support(body.build()?)),
            FunctionSpec::MaxAffine { slopes, offsets, domain } => {
                ConvexFunction::max_affine(slopes.clone(), offsets.clone(), domain.as_ref().map(|d| d.build()).transpose()?)
            }
            FunctionSpec::RadialMaxAffine { slopes, offsets, n } => {
                ConvexFunction::radial_max_affine(need_n(*n, hint)?, slopes.clone(), offsets.clone())
            }
            FunctionSpec::EpiTranslate { x0, alpha, inner } => inner.build_with(Some(x0.len()))?.epi_translate(x0.clone(), *alpha),
            FunctionSpec::Rotate { q, inner } => {
                let n = q.len();
                if q.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidInput("rotation must be square".into()));
                }
                let m = DMatrix::from_fn(n, n, |i, j| q[i][j]);
                inner.build_with(Some(n))?.rotate(m)
            }
            FunctionSpec::EpiScale { lambda, inner } => inner.build_with(hint)?.epi_scale(*lambda),
            FunctionSpec::Scale { factor, inner } => inner.build_with(hint)?.scale_by(*factor),
            FunctionSpec::PlusAffine { slope, offset, inner } => inner.build_with(Some(slope.len()))?.plus_affine(slope.clone(), *offset),
            FunctionSpec::InfConv { left, right } => {
                let (l, r) = build_pair(left, right, hint)?;
                l.inf_conv(r)
            }
            FunctionSpec::Sum { left, right } => {
                let (l, r) = build_pair(left, right, hint)?;
                l.sum(r)
            }
        }
    }

    pub fn from_json(text: &str, hint: Option<usize>) -> Result<ConvexFunction> {
        let spec: FunctionSpec = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        spec.build_with(hint)
    }
}

fn build_pair(left: &FunctionSpec, right: &FunctionSpec, hint: Option<usize>) -> Result<(ConvexFunction, ConvexFunction)> {
    match left.build_with(hint) {
        Ok(l) => {
            let r = right.build_with(Some(l.dim()))?;
            Ok((l, r))
        }
        Err(Error::Schema(_)) => {
            let r = right.build_with(hint)?;
            let l = left.build_with(Some(r.dim()))?;
            Ok((l, r))
        }
        Err(e) => Err(e),
    }
}

impl From<&ConvexFunction> for FunctionSpec {
    fn from(u: &ConvexFunction) -> Self {
        let bx = |f: &ConvexFunction| Box::new(FunctionSpec::from(f));
        match u {
            ConvexFunction::Quadratic { a, b, c } => FunctionSpec::Quadratic { a: a.to_rows(), b: Some(b.clone()), c: *c },
            ConvexFunction::RadialPower { n, p, scale } => FunctionSpec::RadialPower { p: *p, scale: *scale, n: Some(*n) },
            ConvexFunction::Cone { n, t, r } => FunctionSpec::Cone { t: *t, r: *r, n: Some(*n) },
            ConvexFunction::Indicator(k) => FunctionSpec::Indicator { body: k.into() },
            ConvexFunction::Support(k) => FunctionSpec::Support { body: k.into() },
            ConvexFunction::MaxAffine { slopes, offsets, domain } => FunctionSpec::MaxAffine {
                slopes: slopes.clone(),
                offsets: offsets.clone(),
                domain: domain.as_ref().map(Into::into),
            },
            ConvexFunction::RadialMaxAffine { n, slopes, offsets } => {
                FunctionSpec::RadialMaxAffine { slopes: slopes.clone(), offsets: offsets.clone(), n: Some(*n) }
            }
            ConvexFunction::EpiTranslated { inner, x0, alpha } => FunctionSpec::EpiTranslate { x0: x0.clone(), alpha: *alpha, inner: bx(inner) },
            ConvexFunction::Rotated { inner, q } => FunctionSpec::Rotate {
                q: (0..q.nrows()).map(|i| (0..q.ncols()).map(|j| q[(i, j)]).collect()).collect(),
                inner: bx(inner),
            },
            ConvexFunction::EpiScaled { inner, lambda } => FunctionSpec::EpiScale { lambda: *lambda, inner: bx(inner) },
            ConvexFunction::Scaled { inner, factor } => FunctionSpec::Scale { factor: *factor, inner: bx(inner) },
            ConvexFunction::PlusAffine { inner, slope, offset } => FunctionSpec::PlusAffine { slope: slope.clone(), offset: *offset, inner: bx(inner) },
            ConvexFunction::InfConv { left, right } => FunctionSpec::InfConv { left: bx(left), right: bx(right) },
            ConvexFunction::Sum { left, right } => FunctionSpec::Sum { left: bx(left), right: bx(right) },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quadratic_and_cone() {
        let u = FunctionSpec::from_json(r#"{"type":"quadratic","A":[[1,0],[0,2]],"b":[0,0],"c":0}"#, None).unwrap();
        assert_eq!(u.eval(&[1.0, 1.0]), 1.5);
        let c = FunctionSpec::from_json(r#"{"type":"cone","t":0.5,"r":1.0}"#, Some(2)).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(matches!(FunctionSpec::from_json(r#"{"type":"cone","t":0.5,"r":1.0}"#, None), Err(Error::Schema(_))));
    }

    #[test]
    fn parses_wrapped_radial_with_context() {
        let u = FunctionSpec::from_json(
            r#"{"type":"epi_translate","x0":[1,0,0],"alpha":2,"inner":{"type":"radial_power","p":4}}"#,
            None,
        )
        .unwrap();
        assert_eq!(u.dim(), 3);
        assert_eq!(u.eval(&[1.0, 0.0, 0.0]), 2.0);
    }

    #[test]
    fn emits_round_trippable_json() {
        let u = FunctionSpec::from_json(r#"{"type":"indicator","body":{"type":"box","intervals":[[0,1],[0,2]]}}"#, None).unwrap();
        let text = serde_json::to_string(&FunctionSpec::from(&u.conjugate().unwrap())).unwrap();
        let v = FunctionSpec::from_json(&text, None).unwrap();
        assert_eq!(v.eval(&[1.0, 1.0]), 3.0);
    }
}
