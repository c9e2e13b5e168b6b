//! Small dense symmetric linear algebra.
//!
//! Every matrix in this crate is at most 18x18 (the condensed form of a 3D
//! sixth-order tensor), so a cyclic Jacobi sweep is both accurate and fast.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SquareMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, other.n);
        Self::from_fn(self.n, |i, j| {
            (0..self.n).map(|k| self.get(i, k) * other.get(k, j)).sum()
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// `x^T M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        x.iter().zip(self.mul_vec(x)).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                dev = dev.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        dev
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn determinant(&self) -> f64 {
        // Gaussian elimination with partial pivoting on a copy.
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs()))
                .unwrap_or(col);
            if a[pivot * n + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in (col + 1)..n {
                let factor = a[r * n + col] / p;
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
            }
        }
        det
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues, sorted descending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector of `values[k]`.
    pub vectors: SquareMatrix,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.vectors.size()).map(|i| self.vectors.get(i, k)).collect()
    }

    /// `sum_k values[k] v_k v_k^T`.
    pub fn reconstruct(&self) -> SquareMatrix {
        let n = self.vectors.size();
        SquareMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.values[k] * self.vectors.get(i, k) * self.vectors.get(j, k))
                .sum()
        })
    }
}

/// Cyclic Jacobi eigen-decomposition. Only the upper triangle is assumed
/// symmetric; the input is symmetrized before iterating.
pub fn sym_eigen(m: &SquareMatrix) -> SymEigen {
    let n = m.size();
    let mut a = SquareMatrix::from_fn(n, |i, j| 0.5 * (m.get(i, j) + m.get(j, i)));
    let mut v = SquareMatrix::identity(n);
    let scale = a.max_abs();

    if scale > 0.0 {
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a.get(i, j) * a.get(i, j);
                }
            }
            if sqrt(off) <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a.get(y, y).total_cmp(&a.get(x, x)));
    let values = order.iter().map(|&k| a.get(k, k)).collect();
    let vectors = SquareMatrix::from_fn(n, |i, j| v.get(i, order[j]));
    SymEigen { values, vectors }
}

/// Solves `M x = b` for symmetric positive definite `M` by Cholesky.
/// Returns `None` when `M` is not numerically positive definite.
pub fn solve_spd(m: &SquareMatrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = m.size();
    let mut l = SquareMatrix::zeros(n);
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if d <= 0.0 {
            return None;
        }
        let d = sqrt(d);
        l.set(j, j, d);
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / d);
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l.get(i, k) * y[k]).sum();
        y[i] = (b[i] - s) / l.get(i, i);
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| l.get(k, i) * x[k]).sum();
        x[i] = (y[i] - s) / l.get(i, i);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonal_is_sorted() {
        let m = SquareMatrix::from_fn(3, |i, j| if i == j { [2.0, 5.0, -1.0][i] } else { 0.0 });
        let e = sym_eigen(&m);
        assert_eq!(e.values, vec![5.0, 2.0, -1.0]);
        assert_eq!(e.vector(0), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn eigen_reconstructs_dense_matrix() {
        let m = SquareMatrix::from_fn(6, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            1.0 / (1.0 + a + b) + if i == j { 0.3 * a } else { 0.0 }
        });
        let e = sym_eigen(&m);
        let r = e.reconstruct();
        for i in 0..6 {
            for j in 0..6 {
                assert!((r.get(i, j) - m.get(i, j)).abs() < 1e-14);
            }
        }
        let vtv = e.vectors.transpose().mul(&e.vectors);
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((vtv.get(i, j) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn two_by_two_rotation_eigenvalues() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1.
        let m = SquareMatrix::from_fn(2, |i, j| if i == j { 2.0 } else { 1.0 });
        let e = sym_eigen(&m);
        assert!((e.values[0] - 3.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cholesky_solves_and_rejects_indefinite() {
        let m = SquareMatrix::from_fn(2, |i, j| [[4.0, 1.0], [1.0, 3.0]][i][j]);
        let x = solve_spd(&m, &[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-15);
        assert!((x[0] + 3.0 * x[1] - 2.0).abs() < 1e-15);
        let bad = SquareMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(solve_spd(&bad, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn determinant_with_pivoting() {
        let m = SquareMatrix::from_fn(2, |i, j| [[0.0, 1.0], [1.0, 0.0]][i][j]);
        assert_eq!(m.determinant(), -1.0);
    }
}
