//! Convex hulls and intrinsic volumes of polytopes of affine dimension at most three.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{unsupported, Result};
use crate::numerics::linalg::{dot, norm, sub};

/// Facet `{x : normal · x = offset}` with outward unit normal, in hull coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// A polytope described in its affine hull.
#[derive(Clone, Debug, PartialEq)]
pub struct Hull {
    /// Extreme points in ambient coordinates.
    pub vertices: Vec<Vec<f64>>,
    pub origin: Vec<f64>,
    /// Orthonormal basis of the affine hull (rows).
    pub basis: Vec<Vec<f64>>,
    /// Facets in hull coordinates.
    pub facets: Vec<Facet>,
    /// `V_0, …, V_m` with `m` the affine dimension.
    pub volumes: Vec<f64>,
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Counter-clockwise hull indices (monotone chain), collinear points dropped.
pub fn hull_2d(points: &[Vec<f64>], eps: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(points[a][1].total_cmp(&points[b][1])));
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && cross2(&points[lower[lower.len() - 2]], &points[lower[lower.len() - 1]], &points[i]) <= eps {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && cross2(&points[upper[upper.len() - 2]], &points[upper[upper.len() - 1]], &points[i]) <= eps {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area(p: &[Vec<f64>]) -> f64 {
    let m = p.len();
    (0..m).map(|i| p[i][0] * p[(i + 1) % m][1] - p[(i + 1) % m][0] * p[i][1]).sum::<f64>() * 0.5
}

impl Hull {
    pub fn new(points: &[Vec<f64>]) -> Result<Self> {
        let d = points.first().map_or(0, Vec::len);
        let scale = points
            .iter()
            .flat_map(|p| p.iter().map(|x| x.abs()))
            .fold(0.0, f64::max)
            .max(1e-300);
        let eps = 1e-10 * scale;
        let origin = points[0].clone();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for p in points {
            let mut v = sub(p, &origin);
            for b in &basis {
                let c = dot(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
            let nv = norm(&v);
            if nv > eps {
                basis.push(v.iter().map(|x| x / nv).collect());
            }
            if basis.len() == d {
                break;
            }
        }
        // re-orthogonalize against later points for stability
        let m = basis.len();
        if m > 3 {
            return unsupported("polytope geometry is limited to affine dimension 3");
        }
        let local: Vec<Vec<f64>> = points.iter().map(|p| basis.iter().map(|b| dot(&sub(p, &origin), b)).collect()).collect();
        let to_ambient = |y: &[f64]| -> Vec<f64> {
            let mut x = origin.clone();
            for (c, b) in y.iter().zip(&basis) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += c * bi;
                }
            }
            x
        };
        let (ext, facets, volumes): (Vec<usize>, Vec<Facet>, Vec<f64>) = match m {
            0 => (vec![0], Vec::new(), vec![1.0]),
            1 => {
                let (mut lo, mut hi) = (0, 0);
                for (i, y) in local.iter().enumerate() {
                    if y[0] < local[lo][0] {
                        lo = i;
                    }
                    if y[0] > local[hi][0] {
                        hi = i;
                    }
                }
                let facets = vec![
                    Facet { normal: vec![-1.0], offset: -local[lo][0] },
                    Facet { normal: vec![1.0], offset: local[hi][0] },
                ];
                (vec![lo, hi], facets, vec![1.0, local[hi][0] - local[lo][0]])
            }
            2 => {
                let h = hull_2d(&local, eps * eps);
                let poly: Vec<Vec<f64>> = h.iter().map(|&i| local[i].clone()).collect();
                let mut facets = Vec::new();
                let mut perim = 0.0;
                for i in 0..poly.len() {
                    let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
                    let e = sub(b, a);
                    let len = norm(&e);
                    perim += len;
                    let nrm = vec![e[1] / len, -e[0] / len];
                    facets.push(Facet { offset: dot(&nrm, a), normal: nrm });
                }
                (h, facets, vec![1.0, 0.5 * perim, polygon_area(&poly)])
            }
            _ => hull_3d(&local, eps)?,
        };
        let vertices = ext.iter().map(|&i| to_ambient(&local[i])).collect();
        Ok(Self { vertices, origin: origin.clone(), basis, facets, volumes })
    }

    pub fn affine_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn local(&self, x: &[f64]) -> Vec<f64> {
        let y = sub(x, &self.origin);
        self.basis.iter().map(|b| dot(&y, b)).collect()
    }

    /// Distance from `x` to the affine hull.
    pub fn off_hull_distance(&self, x: &[f64]) -> f64 {
        let y = sub(x, &self.origin);
        let mut r = y.clone();
        for b in &self.basis {
            let c = dot(&y, b);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
        norm(&r)
    }
}

type Hull3 = (Vec<usize>, Vec<Facet>, Vec<f64>);

fn hull_3d(p: &[Vec<f64>], eps: f64) -> Result<Hull3> {
    let n = p.len();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let c = cross3(&sub(&p[j], &p[i]), &sub(&p[k], &p[i]));
                let nc = norm(&c);
                if nc <= 1e6 * eps * eps {
                    continue;
                }
                let mut nrm: Vec<f64> = c.iter().map(|x| x / nc).collect();
                let mut off = dot(&nrm, &p[i]);
                let (mut above, mut below) = (false, false);
                for q in p {
                    let s = dot(&nrm, q) - off;
                    above |= s > eps;
                    below |= s < -eps;
                }
                if above && below {
                    continue;
                }
                if above {
                    nrm.iter_mut().for_each(|x| *x = -*x);
                    off = -off;
                }
                let dup = planes.iter().any(|(m, o)| norm(&sub(m, &nrm)) < 1e-9 && (o - off).abs() < eps);
                if !dup {
                    planes.push((nrm, off));
                }
            }
        }
    }
    let mut ext: Vec<usize> = Vec::new();
    let mut facets = Vec::new();
    let mut surface = 0.0;
    let mut polys: Vec<(Vec<usize>, Vec<f64>)> = Vec::new();
    for (nrm, off) in &planes {
        let on: Vec<usize> = (0..n).filter(|&q| (dot(nrm, &p[q]) - off).abs() <= eps).collect();
        // in-plane coordinates
        let helper = if nrm[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let u = cross3(nrm, &helper);
        let nu = norm(&u);
        let u: Vec<f64> = u.iter().map(|x| x / nu).collect();
        let v = cross3(nrm, &u).to_vec();
        let pts: Vec<Vec<f64>> = on.iter().map(|&q| vec![dot(&p[q], &u), dot(&p[q], &v)]).collect();
        let h = hull_2d(&pts, eps * eps);
        let poly: Vec<Vec<f64>> = h.iter().map(|&i| pts[i].clone()).collect();
        surface += polygon_area(&poly).abs();
        let global: Vec<usize> = h.iter().map(|&i| on[i]).collect();
        for &g in &global {
            if !ext.contains(&g) {
                ext.push(g);
            }
        }
        polys.push((global, nrm.clone()));
        facets.push(Facet { normal: nrm.clone(), offset: *off });
    }
    let centroid: Vec<f64> = (0..3).map(|c| ext.iter().map(|&i| p[i][c]).sum::<f64>() / ext.len() as f64).collect();
    let mut volume = 0.0;
    let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (f, (global, nrm)) in polys.iter().enumerate() {
        let off = facets[f].offset;
        let pts: Vec<Vec<f64>> = global.iter().map(|&g| p[g].clone()).collect();
        // area from the fan around the first vertex
        let mut area = 0.0;
        for w in 1..pts.len().saturating_sub(1) {
            area += 0.5 * norm(&cross3(&sub(&pts[w], &pts[0]), &sub(&pts[w + 1], &pts[0])));
        }
        volume += area * (off - dot(nrm, &centroid)) / 3.0;
        for w in 0..global.len() {
            let (a, b) = (global[w], global[(w + 1) % global.len()]);
            edges.entry((a.min(b), a.max(b))).or_default().push(f);
        }
    }
    let mut mean_width = 0.0;
    for ((a, b), fs) in &edges {
        if fs.len() == 2 {
            let c = dot(&facets[fs[0]].normal, &facets[fs[1]].normal).clamp(-1.0, 1.0);
            mean_width += norm(&sub(&p[*a], &p[*b])) * c.acos() / (2.0 * PI);
        }
    }
    Ok((ext, facets, vec![1.0, mean_width, 0.5 * surface, volume]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Vec<Vec<f64>> {
        let mut v = Vec::new();
        for i in 0..8 {
            v.push(vec![(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
        }
        v
    }

    #[test]
    fn unit_cube_volumes() {
        let h = Hull::new(&cube()).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.facets.len(), 6);
        let expect = [1.0, 3.0, 3.0, 1.0];
        for (a, b) in h.volumes.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{:?}", h.volumes);
        }
    }

    #[test]
    fn square_drops_interior_points() {
        let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![2.0, 2.0], vec![0.0, 2.0], vec![1.0, 1.0], vec![1.0, 0.0]];
        let h = Hull::new(&pts).unwrap();
        assert_eq!(h.vertices.len(), 4);
        assert!((h.volumes[2] - 4.0).abs() < 1e-12);
        assert!((h.volumes[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn planar_polygon_in_space() {
        let pts = vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]];
        let h = Hull::new(&pts).unwrap();
        assert_eq!(h.affine_dim(), 2);
        assert!((h.volumes[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn regular_tetrahedron_mean_width() {
        let pts = vec![vec![1.0, 1.0, 1.0], vec![1.0, -1.0, -1.0], vec![-1.0, 1.0, -1.0], vec![-1.0, -1.0, 1.0]];
        let h = Hull::new(&pts).unwrap();
        // edge a = 2√2; V_1 = 6a(π - arccos(1/3))/(2π)
        let a = 8f64.sqrt();
        let expect = 6.0 * a * (PI - (1.0f64 / 3.0).acos()) / (2.0 * PI);
        assert!((h.volumes[1] - expect).abs() < 1e-10);
        assert!((h.volumes[3] - 8.0 / 3.0).abs() < 1e-12);
    }
}
