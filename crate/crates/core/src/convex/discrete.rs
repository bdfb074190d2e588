//! Discrete Legendre transform on tensor grids (linear time per line).

/// `sup_i x_i y - f_i` for each sorted `y`, via the lower convex hull of the
/// points `(x_i, f_i)`. Infinite values are ignored; an empty line gives `-∞`.
pub fn conjugate_1d(x: &[f64], f: &[f64], y: &[f64]) -> Vec<f64> {
    let mut hull: Vec<usize> = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        if !f[i].is_finite() {
            continue;
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the chord from a to i
            let lhs = (f[b] - f[a]) * (x[i] - x[a]);
            let rhs = (f[i] - f[a]) * (x[b] - x[a]);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    if hull.is_empty() {
        return vec![f64::NEG_INFINITY; y.len()];
    }
    let mut out = Vec::with_capacity(y.len());
    let mut k = 0;
    for &yj in y {
        while k + 1 < hull.len() {
            let (a, b) = (hull[k], hull[k + 1]);
            let slope = (f[b] - f[a]) / (x[b] - x[a]);
            if slope < yj {
                k += 1;
            } else {
                break;
            }
        }
        let i = hull[k];
        out.push(x[i] * yj - f[i]);
    }
    out
}

/// Discrete conjugate of `values` sampled on the tensor grid `axes`
/// (row-major, last axis fastest), evaluated on the tensor grid `dual_axes`.
pub fn discrete_conjugate(axes: &[Vec<f64>], values: &[f64], dual_axes: &[Vec<f64>]) -> Vec<f64> {
    let d = axes.len();
    assert_eq!(d, dual_axes.len());
    let mut shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let mut data = values.to_vec();
    // conjugate one axis at a time, from the last to the first
    for axis in (0..d).rev() {
        let before: usize = shape[..axis].iter().product();
        let after: usize = shape[axis + 1..].iter().product();
        let m = shape[axis];
        let mnew = dual_axes[axis].len();
        let mut next = vec![0.0; before * mnew * after];
        let last = axis + 1 == d;
        let mut line = vec![0.0; m];
        for b in 0..before {
            for a in 0..after {
                for i in 0..m {
                    let v = data[(b * m + i) * after + a];
                    line[i] = if last { v } else { -v };
                }
                let res = conjugate_1d(&axes[axis], &line, &dual_axes[axis]);
                for (j, r) in res.into_iter().enumerate() {
                    next[(b * mnew + j) * after + a] = r;
                }
            }
        }
        shape[axis] = mnew;
        data = next;
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linear_grid;

    #[test]
    fn half_square_is_self_conjugate() {
        let x = linear_grid(-3.0, 3.0, 601);
        let f: Vec<f64> = x.iter().map(|v| 0.5 * v * v).collect();
        let y = linear_grid(-2.0, 2.0, 41);
        let g = conjugate_1d(&x, &f, &y);
        for (yj, gj) in y.iter().zip(g) {
            assert!((gj - 0.5 * yj * yj).abs() < 1e-4);
        }
    }

    #[test]
    fn two_dimensional_quadratic() {
        let x = linear_grid(-3.0, 3.0, 241);
        let axes = vec![x.clone(), x.clone()];
        let mut vals = Vec::new();
        for a in &x {
            for b in &x {
                vals.push(0.5 * a * a + b * b);
            }
        }
        let y = linear_grid(-1.0, 1.0, 5);
        let g = discrete_conjugate(&axes, &vals, &[y.clone(), y.clone()]);
        for (i, a) in y.iter().enumerate() {
            for (j, b) in y.iter().enumerate() {
                let expect = 0.5 * a * a + 0.25 * b * b;
                assert!((g[i * 5 + j] - expect).abs() < 1e-3);
            }
        }
    }
}
