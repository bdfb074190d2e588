use rand::Rng;

use super::body::ConvexBody;
use super::function::{radial_split, ConvexFunction};
use crate::error::{invalid, unsupported, Error, Result};
use crate::numerics::linalg::{add, dot, mat_t_vec, mat_vec, norm, scale, sub};

/// `conv(vertices) + radius · B + cone(rays)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Subdifferential {
    pub vertices: Vec<Vec<f64>>,
    pub radius: f64,
    pub rays: Vec<Vec<f64>>,
}

impl Subdifferential {
    pub fn point(y: Vec<f64>) -> Self {
        Self { vertices: vec![y], radius: 0.0, rays: Vec::new() }
    }

    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1 && self.radius == 0.0 && self.rays.is_empty()
    }

    fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>, radius_factor: f64) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| f(v)).collect(),
            radius: self.radius * radius_factor,
            rays: self.rays.iter().map(|v| f(v)).collect(),
        }
    }

    fn translate(&self, t: &[f64]) -> Self {
        Self { vertices: self.vertices.iter().map(|v| add(v, t)).collect(), ..self.clone() }
    }

    fn minkowski_sum(&self, other: &Self) -> Self {
        let vertices = self.vertices.iter().flat_map(|a| other.vertices.iter().map(move |b| add(a, b))).collect();
        let mut rays = self.rays.clone();
        rays.extend(other.rays.iter().cloned());
        Self { vertices, radius: self.radius + other.radius, rays }
    }

    /// A random element; ray coefficients are drawn from `[0, ray_scale]`.
    pub fn sample<R: Rng>(&self, rng: &mut R, ray_scale: f64) -> Vec<f64> {
        let n = self.vertices[0].len();
        let w: Vec<f64> = self.vertices.iter().map(|_| -rng.random::<f64>().ln()).collect();
        let total: f64 = w.iter().sum();
        let mut y = vec![0.0; n];
        for (v, wi) in self.vertices.iter().zip(&w) {
            for (yi, vi) in y.iter_mut().zip(v) {
                *yi += vi * wi / total;
            }
        }
        if self.radius > 0.0 {
            let g: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let ng = norm(&g).max(1e-300);
            let r = self.radius * rng.random::<f64>();
            y = add(&y, &scale(&g, r / ng));
        }
        for ray in &self.rays {
            y = add(&y, &scale(ray, ray_scale * rng.random::<f64>()));
        }
        y
    }
}

const TOL: f64 = 1e-10;

fn indicator_subdiff(k: &ConvexBody, x: &[f64]) -> Result<Subdifferential> {
    if !k.contains(x, TOL) {
        return invalid("point outside the domain");
    }
    Ok(Subdifferential { vertices: vec![vec![0.0; x.len()]], radius: 0.0, rays: k.normal_rays(x, TOL) })
}

impl ConvexFunction {
    /// Subdifferential at a point of the domain.
    pub fn subdifferential(&self, x: &[f64]) -> Result<Subdifferential> {
        let n = x.len();
        match self {
            ConvexFunction::Quadratic { .. } | ConvexFunction::RadialPower { .. } => Ok(Subdifferential::point(self.gradient(x)?)),
            ConvexFunction::Cone { t, r, .. } => {
                let rho = norm(x);
                if rho > r * (1.0 + TOL) {
                    return invalid("point outside the domain");
                }
                if rho == 0.0 {
                    return Ok(Subdifferential { vertices: vec![vec![0.0; n]], radius: *t, rays: Vec::new() });
                }
                let dir = scale(x, 1.0 / rho);
                let rays = if (rho - r).abs() <= TOL * r { vec![dir.clone()] } else { Vec::new() };
                Ok(Subdifferential { vertices: vec![scale(&dir, *t)], radius: 0.0, rays })
            }
            ConvexFunction::Indicator(k) => indicator_subdiff(k, x),
            ConvexFunction::Support(k) => match k {
                ConvexBody::Ball { center, radius } if norm(x) == 0.0 => {
                    Ok(Subdifferential { vertices: vec![center.clone()], radius: *radius, rays: Vec::new() })
                }
                _ => Ok(Subdifferential { vertices: k.face(x, TOL).unwrap_or_default(), radius: 0.0, rays: Vec::new() }),
            },
            ConvexFunction::MaxAffine { slopes, offsets, domain } => {
                let vals: Vec<f64> = slopes.iter().zip(offsets).map(|(a, b)| dot(a, x) + b).collect();
                let best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let vertices = (0..vals.len()).filter(|&i| vals[i] >= best - TOL).map(|i| slopes[i].clone()).collect();
                let rays = match domain {
                    Some(d) => {
                        if !d.contains(x, TOL) {
                            return invalid("point outside the domain");
                        }
                        d.normal_rays(x, TOL)
                    }
                    None => Vec::new(),
                };
                Ok(Subdifferential { vertices, radius: 0.0, rays })
            }
            ConvexFunction::RadialMaxAffine { slopes, offsets, .. } => {
                let rho = norm(x);
                let vals: Vec<f64> = slopes.iter().zip(offsets).map(|(a, b)| a * rho + b).collect();
                let best = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let active: Vec<f64> = (0..vals.len()).filter(|&i| vals[i] >= best - TOL).map(|i| slopes[i]).collect();
                let (lo, hi) = active.iter().fold((f64::INFINITY, 0.0f64), |(l, h), s| (l.min(*s), h.max(*s)));
                if rho == 0.0 {
                    return Ok(Subdifferential { vertices: vec![vec![0.0; n]], radius: hi, rays: Vec::new() });
                }
                let dir = scale(x, 1.0 / rho);
                let mut vertices = vec![scale(&dir, lo)];
                if hi > lo {
                    vertices.push(scale(&dir, hi));
                }
                Ok(Subdifferential { vertices, radius: 0.0, rays: Vec::new() })
            }
            ConvexFunction::EpiTranslated { inner, x0, .. } => inner.subdifferential(&sub(x, x0)),
            ConvexFunction::Rotated { inner, q } => Ok(inner.subdifferential(&mat_t_vec(q, x))?.map(|v| mat_vec(q, v), 1.0)),
            ConvexFunction::EpiScaled { inner, lambda } => inner.subdifferential(&scale(x, 1.0 / lambda)),
            ConvexFunction::Scaled { inner, factor } => Ok(inner.subdifferential(x)?.map(|v| scale(v, *factor), *factor)),
            ConvexFunction::PlusAffine { inner, slope, .. } => Ok(inner.subdifferential(x)?.translate(slope)),
            ConvexFunction::Sum { left, right } => Ok(left.subdifferential(x)?.minkowski_sum(&right.subdifferential(x)?)),
            ConvexFunction::InfConv { left, right } => {
                let rho = norm(x);
                let (_, a) = radial_split(left, right, rho);
                let dir: Vec<f64> = if rho > 0.0 { scale(x, 1.0 / rho) } else { vec![0.0; n] };
                let s1 = left.subdifferential(&scale(&dir, a))?;
                if s1.is_singleton() {
                    return Ok(s1);
                }
                let s2 = right.subdifferential(&scale(&dir, rho - a))?;
                if s2.is_singleton() {
                    return Ok(s2);
                }
                unsupported("subdifferential of an infimal convolution with two non-smooth parts")
            }
        }
        .and_then(|s: Subdifferential| if s.vertices.is_empty() { Err(Error::NotDifferentiable) } else { Ok(s) })
    }
}
