//! Matrix forms of the elastic and second-gradient quadratic forms.
//!
//! Both act on arrays symmetric in one index pair. The pair space is given
//! the orthonormal (Mandel-weighted) basis: `e_j (x) e_j` for diagonal pairs
//! and `(e_j (x) e_l + e_l (x) e_j) / sqrt(2)` for off-diagonal ones, so
//! eigenvalues of the condensed matrices are basis independent.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use super::{check_dims, Dense, Dim, ElasticTensor, GradElasticTensor, QuadraticCoefficients};
use crate::linalg::{sym_eigen, SquareMatrix};
use crate::Result;

/// Symmetric index pairs in Voigt order.
pub(crate) fn pairs(dim: Dim) -> &'static [(usize, usize)] {
    match dim {
        Dim::Two => &[(0, 0), (1, 1), (0, 1)],
        Dim::Three => &[(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)],
    }
}

/// Entries `(j, l, weight)` of the basis element for pair `p`.
fn pair_entries(p: (usize, usize)) -> ([(usize, usize, f64); 2], usize) {
    let (j, l) = p;
    if j == l {
        ([(j, j, 1.0), (j, j, 0.0)], 1)
    } else {
        let w = 1.0 / SQRT_2;
        ([(j, l, w), (l, j, w)], 2)
    }
}

/// Mandel matrix of `C` (3x3 in 2D, 6x6 in 3D).
pub fn condensed_elastic_matrix(c: &ElasticTensor) -> SquareMatrix {
    let ps = pairs(c.dim());
    SquareMatrix::from_fn(ps.len(), |a, b| {
        let (ea, na) = pair_entries(ps[a]);
        let (eb, nb) = pair_entries(ps[b]);
        let mut s = 0.0;
        for &(i, j, wa) in &ea[..na] {
            for &(h, k, wb) in &eb[..nb] {
                s += wa * wb * c.get([i, j, h, k]);
            }
        }
        s
    })
}

/// Matrix `G` with `x^T G x = Phi_A(beta(x))`; size `N^2 (N+1) / 2`.
///
/// Coordinates are ordered component-major: `alpha = i * npairs + p`.
pub fn condensed_grad_matrix(a: &GradElasticTensor) -> SquareMatrix {
    let dim = a.dim();
    let ps = pairs(dim);
    let np = ps.len();
    SquareMatrix::from_fn(dim.n() * np, |r, s| {
        let (ci, pi) = (r / np, r % np);
        let (ch, ph) = (s / np, s % np);
        let (ea, na) = pair_entries(ps[pi]);
        let (eb, nb) = pair_entries(ps[ph]);
        let mut acc = 0.0;
        for &(j, l, wa) in &ea[..na] {
            for &(k, m, wb) in &eb[..nb] {
                acc += wa * wb * a.get([j, l, ci, k, m, ch]);
            }
        }
        acc
    })
}

/// Names of the condensed coordinates, `b_ijl` (1-based) in the order of
/// [`condensed_grad_matrix`].
pub fn grad_coordinate_labels(dim: Dim) -> Vec<String> {
    let ps = pairs(dim);
    (0..dim.n())
        .flat_map(|i| ps.iter().map(move |&(j, l)| format!("b{}{}{}", i + 1, j + 1, l + 1)))
        .collect()
}

/// Coordinates of `beta` in the condensed basis.
pub fn beta_coordinates(beta: &QuadraticCoefficients) -> Vec<f64> {
    let dim = beta.dim();
    let ps = pairs(dim);
    (0..dim.n())
        .flat_map(|i| {
            ps.iter().map(move |&(j, l)| {
                if j == l {
                    beta.get([i, j, j])
                } else {
                    SQRT_2 * beta.get([i, j, l])
                }
            })
        })
        .collect()
}

/// Inverse of [`beta_coordinates`].
pub fn beta_from_coordinates(dim: Dim, x: &[f64]) -> QuadraticCoefficients {
    let ps = pairs(dim);
    let np = ps.len();
    let mut t = Dense::<3>::zeros(dim);
    for (alpha, &v) in x.iter().enumerate() {
        let (i, p) = (alpha / np, alpha % np);
        let (j, l) = ps[p];
        if j == l {
            t.set([i, j, j], v);
        } else {
            t.set([i, j, l], v / SQRT_2);
            t.set([i, l, j], v / SQRT_2);
        }
    }
    QuadraticCoefficients::projected(&t)
}

/// `Phi_A(beta) = A_jlikmh beta_ijl beta_hkm`.
pub fn grad_quadratic_form(a: &GradElasticTensor, beta: &QuadraticCoefficients) -> Result<f64> {
    check_dims(a.dim(), beta.dim())?;
    let n = a.dim().n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let bl = beta.get([i, j, l]);
                if bl == 0.0 {
                    continue;
                }
                for h in 0..n {
                    for k in 0..n {
                        for m in 0..n {
                            s += a.get([j, l, i, k, m, h]) * bl * beta.get([h, k, m]);
                        }
                    }
                }
            }
        }
    }
    Ok(s)
}

/// Tensors whose quadratic form has a condensed matrix.
pub trait Definite {
    fn condensed(&self) -> SquareMatrix;
}

impl Definite for ElasticTensor {
    fn condensed(&self) -> SquareMatrix {
        condensed_elastic_matrix(self)
    }
}

impl Definite for GradElasticTensor {
    fn condensed(&self) -> SquareMatrix {
        condensed_grad_matrix(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Definiteness {
    pub positive_definite: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Threshold the smallest eigenvalue had to exceed.
    pub tolerance: f64,
}

impl Definiteness {
    pub const RELATIVE_TOLERANCE: f64 = 1e-12;

    pub fn of_matrix(m: &SquareMatrix) -> Self {
        Self::with_tolerance(m, Self::RELATIVE_TOLERANCE)
    }

    /// Smallest eigenvalue must exceed `relative * max |eigenvalue|`.
    pub fn with_tolerance(m: &SquareMatrix, relative: f64) -> Self {
        let eig = sym_eigen(m);
        let scale = eig.max_abs();
        let tolerance = relative * scale;
        Definiteness {
            positive_definite: scale > 0.0 && eig.min() > tolerance,
            min_eigenvalue: eig.min(),
            max_eigenvalue: eig.max(),
            tolerance,
        }
    }
}

/// Definiteness of the condensed matrix, with threshold `1e-12 * max |eigenvalue|`.
pub fn is_positive_definite<T: Definite>(t: &T) -> Definiteness {
    Definiteness::of_matrix(&t.condensed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Lame;

    #[test]
    fn condensed_sizes() {
        assert_eq!(condensed_grad_matrix(&GradElasticTensor::zeros(Dim::Two)).size(), 6);
        assert_eq!(condensed_grad_matrix(&GradElasticTensor::zeros(Dim::Three)).size(), 18);
        assert_eq!(condensed_grad_matrix(&GradElasticTensor::zeros(Dim::Two)).max_abs(), 0.0);
    }

    #[test]
    fn coordinates_roundtrip() {
        let x = [0.5, -1.0, 2.0, 0.25, 3.0, -0.75];
        let beta = beta_from_coordinates(Dim::Two, &x);
        let back = beta_coordinates(&beta);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn isotropic_elastic_definiteness() {
        let c = ElasticTensor::isotropic(Lame::new(1.0, 1.0), Dim::Two);
        let d = is_positive_definite(&c);
        assert!(d.positive_definite);
        // Mandel eigenvalues: 2(lambda + mu) = 4, 2 mu = 2 (twice).
        assert!((d.max_eigenvalue - 4.0).abs() < 1e-14);
        assert!((d.min_eigenvalue - 2.0).abs() < 1e-14);

        let zero = ElasticTensor::zeros(Dim::Two);
        let d = is_positive_definite(&zero);
        assert!(!d.positive_definite);
        assert_eq!(d.min_eigenvalue, 0.0);
    }
}
