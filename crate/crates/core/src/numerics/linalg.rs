use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};

/// Symmetric matrix stored as its packed upper triangle, so symmetry holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * (n + 1) / 2] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from full rows, rejecting asymmetric input beyond a relative `1e-12`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("matrix must be square");
        }
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if !a.is_finite() || !b.is_finite() {
                    return invalid("matrix entries must be finite");
                }
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return invalid("matrix is not symmetric");
                }
                m.set(i, j, 0.5 * (a + b));
            }
        }
        Ok(m)
    }

    /// Symmetric part of a dense matrix.
    pub fn from_dmatrix(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, 0.5 * (a[(i, j)] + a[(j, i)]));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[packed_index(self.n, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = packed_index(self.n, i, j);
        self.data[k] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v * f).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            acc += self.get(i, i) * x[i] * x[i];
            for j in i + 1..self.n {
                acc += 2.0 * self.get(i, j) * x[i] * x[j];
            }
        }
        acc
    }

    /// `Bᵀ A B` for a dense `n × m` matrix `B`.
    pub fn congruence(&self, b: &DMatrix<f64>) -> Self {
        Self::from_dmatrix(&(b.transpose() * self.to_dmatrix() * b))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.n == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = self.to_dmatrix().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// True when the smallest eigenvalue exceeds `tol` times the largest magnitude.
    pub fn is_positive_definite(&self, tol: f64) -> bool {
        let ev = self.eigenvalues();
        match (ev.first(), ev.last()) {
            (Some(&lo), Some(&hi)) => lo > tol * hi.abs().max(1.0),
            _ => true,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        match self.to_dmatrix().try_inverse() {
            Some(inv) => Ok(Self::from_dmatrix(&inv)),
            None => invalid("matrix is singular"),
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let lu = self.to_dmatrix().lu();
        match lu.solve(&DVector::from_column_slice(rhs)) {
            Some(x) => Ok(x.iter().copied().collect()),
            None => invalid("matrix is singular"),
        }
    }

    /// Elementary symmetric function `e_k` of the eigenvalues, computed as the
    /// sum of `k × k` principal minors.
    pub fn elem_sym(&self, k: usize) -> f64 {
        let n = self.n;
        if k == 0 {
            return 1.0;
        }
        if k > n {
            return 0.0;
        }
        match k {
            1 => (0..n).map(|i| self.get(i, i)).sum(),
            _ => {
                let mut idx: Vec<usize> = (0..k).collect();
                let mut total = 0.0;
                let mut buf = vec![0.0; k * k];
                loop {
                    for (a, &i) in idx.iter().enumerate() {
                        for (b, &j) in idx.iter().enumerate() {
                            buf[a * k + b] = self.get(i, j);
                        }
                    }
                    total += small_det(&mut buf, k);
                    // advance to the next k-subset in lexicographic order
                    let mut p = k;
                    loop {
                        if p == 0 {
                            return total;
                        }
                        p -= 1;
                        if idx[p] < n - k + p {
                            idx[p] += 1;
                            for q in p + 1..k {
                                idx[q] = idx[q - 1] + 1;
                            }
                            break;
                        }
                    }
                }
            }
        }
    }
}

/// Determinant by Gaussian elimination with partial pivoting; destroys `a`.
pub(crate) fn small_det(a: &mut [f64], k: usize) -> f64 {
    match k {
        1 => return a[0],
        2 => return a[0] * a[3] - a[1] * a[2],
        3 => {
            return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => {}
    }
    let mut det = 1.0;
    for c in 0..k {
        let p = (c..k).max_by(|&x, &y| a[x * k + c].abs().total_cmp(&a[y * k + c].abs())).unwrap();
        if a[p * k + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..k {
                a.swap(p * k + j, c * k + j);
            }
            det = -det;
        }
        let piv = a[c * k + c];
        det *= piv;
        for r in c + 1..k {
            let f = a[r * k + c] / piv;
            for j in c..k {
                a[r * k + j] -= f * a[c * k + j];
            }
        }
    }
    det
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], f: f64) -> Vec<f64> {
    a.iter().map(|x| x * f).collect()
}

/// `M x` for a dense matrix.
pub fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(x)).iter().copied().collect()
}

/// `Mᵀ x` for a dense matrix.
pub fn mat_t_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (m.transpose() * DVector::from_column_slice(x)).iter().copied().collect()
}
