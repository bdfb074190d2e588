use nalgebra::DMatrix;

use super::hull::Hull;
use crate::error::{invalid, unsupported, Result};
use crate::numerics::linalg::{add, dot, mat_t_vec, mat_vec, norm, sub};
use crate::numerics::{binom, elementary_symmetric, kappa};

/// A convex body: ball, axis-parallel box or polytope.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexBody {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Polytope(Box<Hull>),
}

impl ConvexBody {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || center.is_empty() {
            return invalid("ball needs a positive radius and a centre");
        }
        Ok(ConvexBody::Ball { center, radius })
    }

    pub fn unit_ball(n: usize) -> Self {
        ConvexBody::Ball { center: vec![0.0; n], radius: 1.0 }
    }

    pub fn cuboid(intervals: &[(f64, f64)]) -> Result<Self> {
        if intervals.is_empty() || intervals.iter().any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return invalid("box needs finite intervals with lo <= hi");
        }
        Ok(ConvexBody::Box { lo: intervals.iter().map(|i| i.0).collect(), hi: intervals.iter().map(|i| i.1).collect() })
    }

    pub fn polytope(points: &[Vec<f64>]) -> Result<Self> {
        let d = points.first().map_or(0, Vec::len);
        if d == 0 || points.iter().any(|p| p.len() != d || p.iter().any(|x| !x.is_finite())) {
            return invalid("polytope needs finite vertices of equal dimension");
        }
        let hull = Hull::new(points)?;
        if d == 1 {
            let (a, b) = (hull.vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min), hull.vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max));
            return Ok(ConvexBody::Box { lo: vec![a], hi: vec![b] });
        }
        Ok(ConvexBody::Polytope(Box::new(hull)))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Ball { center, .. } => center.len(),
            ConvexBody::Box { lo, .. } => lo.len(),
            ConvexBody::Polytope(h) => h.origin.len(),
        }
    }

    /// Vertices of a box or polytope; `None` for balls.
    pub fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            ConvexBody::Ball { .. } => None,
            ConvexBody::Box { lo, hi } => {
                let d = lo.len();
                Some((0..1usize << d).map(|m| (0..d).map(|i| if m >> i & 1 == 1 { hi[i] } else { lo[i] }).collect()).collect())
            }
            ConvexBody::Polytope(h) => Some(h.vertices.clone()),
        }
    }

    pub fn center(&self) -> Vec<f64> {
        match self {
            ConvexBody::Ball { center, .. } => center.clone(),
            ConvexBody::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            ConvexBody::Polytope(h) => {
                let m = h.vertices.len() as f64;
                (0..h.origin.len()).map(|c| h.vertices.iter().map(|v| v[c]).sum::<f64>() / m).collect()
            }
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ConvexBody::Ball { center, radius } => (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect()),
            ConvexBody::Box { lo, hi } => (lo.clone(), hi.clone()),
            ConvexBody::Polytope(h) => {
                let d = h.origin.len();
                let lo = (0..d).map(|c| h.vertices.iter().map(|v| v[c]).fold(f64::INFINITY, f64::min)).collect();
                let hi = (0..d).map(|c| h.vertices.iter().map(|v| v[c]).fold(f64::NEG_INFINITY, f64::max)).collect();
                (lo, hi)
            }
        }
    }

    /// Membership with absolute slack `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            ConvexBody::Ball { center, radius } => norm(&sub(x, center)) <= radius + tol,
            ConvexBody::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *v >= a - tol && *v <= b + tol),
            ConvexBody::Polytope(h) => {
                if h.off_hull_distance(x) > tol {
                    return false;
                }
                let y = h.local(x);
                h.facets.iter().all(|f| dot(&f.normal, &y) <= f.offset + tol)
            }
        }
    }

    /// Support function `h_K(x) = max_{k ∈ K} ⟨k, x⟩`.
    pub fn support(&self, x: &[f64]) -> f64 {
        match self {
            ConvexBody::Ball { center, radius } => dot(center, x) + radius * norm(x),
            ConvexBody::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).map(|(v, (a, b))| (v * a).max(v * b)).sum(),
            ConvexBody::Polytope(h) => h.vertices.iter().map(|v| dot(v, x)).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Intrinsic volume `V_j`.
    pub fn intrinsic_volume(&self, j: usize) -> f64 {
        let d = self.dim();
        if j > d {
            return 0.0;
        }
        match self {
            ConvexBody::Ball { radius, .. } => binom(d, j) * kappa(d) / kappa(d - j) * radius.powi(j as i32),
            ConvexBody::Box { lo, hi } => {
                let sides: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| b - a).collect();
                elementary_symmetric(&sides, j)
            }
            ConvexBody::Polytope(h) => h.volumes.get(j).copied().unwrap_or(0.0),
        }
    }

    pub fn volume(&self) -> f64 {
        self.intrinsic_volume(self.dim())
    }

    /// Orthogonal projection onto the span of the orthonormal columns of `frame`,
    /// expressed in frame coordinates.
    pub fn project(&self, frame: &DMatrix<f64>) -> Result<Self> {
        match self {
            ConvexBody::Ball { center, radius } => Ok(ConvexBody::Ball { center: mat_t_vec(frame, center), radius: *radius }),
            _ => {
                let pts: Vec<Vec<f64>> = self.vertices().unwrap().iter().map(|v| mat_t_vec(frame, v)).collect();
                ConvexBody::polytope(&pts)
            }
        }
    }

    /// Image under `x ↦ Q x + t`.
    pub fn affine_image(&self, q: &DMatrix<f64>, t: &[f64]) -> Result<Self> {
        match self {
            ConvexBody::Ball { center, radius } => Ok(ConvexBody::Ball { center: add(&mat_vec(q, center), t), radius: *radius }),
            _ => {
                let pts: Vec<Vec<f64>> = self.vertices().unwrap().iter().map(|v| add(&mat_vec(q, v), t)).collect();
                ConvexBody::polytope(&pts)
            }
        }
    }

    pub fn translate(&self, t: &[f64]) -> Self {
        match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball { center: add(center, t), radius: *radius },
            ConvexBody::Box { lo, hi } => ConvexBody::Box { lo: add(lo, t), hi: add(hi, t) },
            ConvexBody::Polytope(_) => {
                let pts: Vec<Vec<f64>> = self.vertices().unwrap().iter().map(|v| add(v, t)).collect();
                ConvexBody::polytope(&pts).expect("translation preserves validity")
            }
        }
    }

    pub fn scale(&self, f: f64) -> Self {
        match self {
            ConvexBody::Ball { center, radius } => ConvexBody::Ball { center: center.iter().map(|c| c * f).collect(), radius: radius * f },
            ConvexBody::Box { lo, hi } => ConvexBody::Box { lo: lo.iter().map(|c| c * f).collect(), hi: hi.iter().map(|c| c * f).collect() },
            ConvexBody::Polytope(_) => {
                let pts: Vec<Vec<f64>> = self.vertices().unwrap().iter().map(|v| v.iter().map(|c| c * f).collect()).collect();
                ConvexBody::polytope(&pts).expect("scaling preserves validity")
            }
        }
    }

    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (ConvexBody::Ball { center: c1, radius: r1 }, ConvexBody::Ball { center: c2, radius: r2 }) => {
                Ok(ConvexBody::Ball { center: add(c1, c2), radius: r1 + r2 })
            }
            (ConvexBody::Box { lo: l1, hi: h1 }, ConvexBody::Box { lo: l2, hi: h2 }) => Ok(ConvexBody::Box { lo: add(l1, l2), hi: add(h1, h2) }),
            (ConvexBody::Ball { .. }, _) | (_, ConvexBody::Ball { .. }) => unsupported("Minkowski sum of a ball with a polytope"),
            _ => {
                let (a, b) = (self.vertices().unwrap(), other.vertices().unwrap());
                let pts: Vec<Vec<f64>> = a.iter().flat_map(|p| b.iter().map(move |q| add(p, q))).collect();
                ConvexBody::polytope(&pts)
            }
        }
    }

    /// Intersection of two boxes; `None` when empty.
    pub fn box_intersection(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (ConvexBody::Box { lo: l1, hi: h1 }, ConvexBody::Box { lo: l2, hi: h2 }) => {
                let lo: Vec<f64> = l1.iter().zip(l2).map(|(a, b)| a.max(*b)).collect();
                let hi: Vec<f64> = h1.iter().zip(h2).map(|(a, b)| a.min(*b)).collect();
                if lo.iter().zip(&hi).all(|(a, b)| a <= b) { Some(ConvexBody::Box { lo, hi }) } else { None }
            }
            _ => None,
        }
    }

    /// Union of two boxes when it is itself a box.
    pub fn box_union(&self, other: &Self) -> Option<Self> {
        match (self, other) {
            (ConvexBody::Box { lo: l1, hi: h1 }, ConvexBody::Box { lo: l2, hi: h2 }) => {
                let d = l1.len();
                let differ: Vec<usize> = (0..d).filter(|&i| l1[i] != l2[i] || h1[i] != h2[i]).collect();
                match differ.as_slice() {
                    [] => Some(self.clone()),
                    [i] if l1[*i].max(l2[*i]) <= h1[*i].min(h2[*i]) => {
                        let (mut lo, mut hi) = (l1.clone(), h1.clone());
                        lo[*i] = l1[*i].min(l2[*i]);
                        hi[*i] = h1[*i].max(h2[*i]);
                        Some(ConvexBody::Box { lo, hi })
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Generators of the normal cone at a boundary point (empty in the interior).
    pub fn normal_rays(&self, x: &[f64], tol: f64) -> Vec<Vec<f64>> {
        match self {
            ConvexBody::Ball { center, radius } => {
                let y = sub(x, center);
                let r = norm(&y);
                if (r - radius).abs() <= tol && r > 0.0 { vec![y.iter().map(|v| v / r).collect()] } else { Vec::new() }
            }
            ConvexBody::Box { lo, hi } => {
                let d = lo.len();
                let mut rays = Vec::new();
                for i in 0..d {
                    let mut e = vec![0.0; d];
                    if (x[i] - hi[i]).abs() <= tol {
                        e[i] = 1.0;
                        rays.push(e.clone());
                    }
                    if (x[i] - lo[i]).abs() <= tol {
                        e[i] = -1.0;
                        rays.push(e);
                    }
                }
                rays
            }
            ConvexBody::Polytope(h) => {
                let y = h.local(x);
                let mut rays: Vec<Vec<f64>> = h
                    .facets
                    .iter()
                    .filter(|f| (dot(&f.normal, &y) - f.offset).abs() <= tol)
                    .map(|f| {
                        let mut v = vec![0.0; h.origin.len()];
                        for (c, b) in f.normal.iter().zip(&h.basis) {
                            for (vi, bi) in v.iter_mut().zip(b) {
                                *vi += c * bi;
                            }
                        }
                        v
                    })
                    .collect();
                // directions orthogonal to a lower-dimensional hull are normal everywhere
                let d = h.origin.len();
                if h.affine_dim() < d {
                    for e in 0..d {
                        let mut v = vec![0.0; d];
                        v[e] = 1.0;
                        for b in &h.basis {
                            let c = dot(&v, b);
                            for (vi, bi) in v.iter_mut().zip(b) {
                                *vi -= c * bi;
                            }
                        }
                        if norm(&v) > 1e-9 {
                            rays.push(v.clone());
                            rays.push(v.iter().map(|x| -x).collect());
                        }
                    }
                }
                rays
            }
        }
    }

    /// Points of `K` maximizing `⟨·, x⟩`, as a vertex list (balls give one point
    /// unless `x = 0`).
    pub fn face(&self, x: &[f64], tol: f64) -> Option<Vec<Vec<f64>>> {
        match self {
            ConvexBody::Ball { center, radius } => {
                let r = norm(x);
                if r == 0.0 { None } else { Some(vec![add(center, &x.iter().map(|v| v * radius / r).collect::<Vec<_>>())]) }
            }
            _ => {
                let verts = self.vertices().unwrap();
                let best = self.support(x);
                Some(verts.into_iter().filter(|v| dot(v, x) >= best - tol).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        let b = ConvexBody::unit_ball(3);
        assert!((b.intrinsic_volume(1) - 4.0).abs() < 1e-13);
        assert!((b.intrinsic_volume(2) - 2.0 * PI).abs() < 1e-13);
        assert!((b.intrinsic_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert_eq!(b.intrinsic_volume(0), 1.0);
    }

    #[test]
    fn box_volumes_and_polytope_agree() {
        let b = ConvexBody::cuboid(&[(0.0, 1.0), (0.0, 2.0), (-1.0, 2.0)]).unwrap();
        let p = ConvexBody::polytope(&b.vertices().unwrap()).unwrap();
        for j in 0..=3 {
            assert!((b.intrinsic_volume(j) - p.intrinsic_volume(j)).abs() < 1e-10, "j={j}");
        }
    }

    #[test]
    fn projection_of_square_onto_diagonal() {
        let b = ConvexBody::cuboid(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let s = 0.5f64.sqrt();
        let frame = DMatrix::from_column_slice(2, 1, &[s, s]);
        let p = b.project(&frame).unwrap();
        assert!((p.intrinsic_volume(1) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn box_union_and_intersection() {
        let a = ConvexBody::cuboid(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let b = ConvexBody::cuboid(&[(0.5, 2.0), (0.0, 1.0)]).unwrap();
        assert_eq!(a.box_union(&b).unwrap(), ConvexBody::cuboid(&[(0.0, 2.0), (0.0, 1.0)]).unwrap());
        assert_eq!(a.box_intersection(&b).unwrap(), ConvexBody::cuboid(&[(0.5, 1.0), (0.0, 1.0)]).unwrap());
    }
}
