use serde::{Deserialize, Serialize};

use super::{WeightFunction, WeightKind};
use crate::error::{Error, Result};

/// JSON form of a weight function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Tent { s0: f64 },
    LogCap,
    Bump { a: f64, b: f64 },
    PolyCapped { coeffs: Vec<f64>, cutoff: f64 },
    Transform { l: i32, inner: Box<WeightSpec> },
    Sum { terms: Vec<WeightSpec> },
    Scaled { factor: f64, inner: Box<WeightSpec> },
}

impl WeightSpec {
    pub fn build(&self) -> Result<WeightFunction> {
        Ok(match self {
            WeightSpec::Tent { s0 } => WeightFunction::tent(*s0)?,
            WeightSpec::LogCap => WeightFunction::log_cap(),
            WeightSpec::Bump { a, b } => WeightFunction::bump(*a, *b)?,
            WeightSpec::PolyCapped { coeffs, cutoff } => WeightFunction::poly_capped(coeffs.clone(), *cutoff)?,
            WeightSpec::Transform { l, inner } => WeightFunction::transform(inner.build()?, *l),
            WeightSpec::Sum { terms } => WeightFunction::sum(terms.iter().map(|t| t.build()).collect::<Result<_>>()?),
            WeightSpec::Scaled { factor, inner } => {
                if !factor.is_finite() {
                    return Err(Error::InvalidInput("scale factor must be finite".into()));
                }
                WeightFunction::scaled(inner.build()?, *factor)
            }
        })
    }

    pub fn from_json(text: &str) -> Result<WeightFunction> {
        let spec: WeightSpec = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        spec.build()
    }
}

impl From<&WeightFunction> for WeightSpec {
    fn from(w: &WeightFunction) -> Self {
        match w.kind() {
            WeightKind::Tent { s0 } => WeightSpec::Tent { s0: *s0 },
            WeightKind::Bump { a, b } => WeightSpec::Bump { a: *a, b: *b },
            WeightKind::LogCap => WeightSpec::LogCap,
            WeightKind::PolyCapped { coeffs, cutoff } => WeightSpec::PolyCapped { coeffs: coeffs.clone(), cutoff: *cutoff },
            WeightKind::Scaled { inner, factor } => WeightSpec::Scaled { factor: *factor, inner: Box::new(inner.into()) },
            WeightKind::Sum(terms) => WeightSpec::Sum { terms: terms.iter().map(Into::into).collect() },
            WeightKind::TransformOf { inner, power } => WeightSpec::Transform { l: *power, inner: Box::new(inner.into()) },
        }
    }
}
