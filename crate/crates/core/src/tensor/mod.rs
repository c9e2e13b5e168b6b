//! Dense tensor algebra for `N = 2, 3`.
//!
//! Fourth-order elastic tensors carry the minor and major symmetries
//! `C_ijhk = C_jihk = C_ijkh = C_hkij`; sixth-order second-gradient tensors
//! carry the Mindlin symmetries `A_ijhlmn = A_jihlmn = A_ijhmln = A_lmnijh`,
//! where the first index pair of each triple is the derivative pair and the
//! third index is the displacement component. Symmetries are checked on
//! construction (relative tolerance [`CONSTRUCTION_TOLERANCE`]) and then
//! enforced exactly by averaging over the symmetry group.

mod classify;
mod condensed;
mod dense;
mod symmetrize;
mod transform;

use alloc::vec::Vec;

pub use classify::{classify_symmetry, classify_with_tolerance, Classification, CLASSIFICATION_TOLERANCE, Probe, ProbeKind, ProbeSet, SymmetryClass};
pub use condensed::{
    beta_coordinates, beta_from_coordinates, condensed_elastic_matrix, condensed_grad_matrix, grad_coordinate_labels, grad_quadratic_form,
    is_positive_definite, Definite, Definiteness,
};
pub use dense::{indices, Dense};
pub use symmetrize::{desymmetrize, symmetrize, RAW_SYMMETRIES};
pub use transform::OrthogonalTransform;

use crate::linalg::{sym_eigen, SquareMatrix, SymEigen};
use crate::{Error, Result};

/// Relative tolerance for symmetry checks on construction.
pub const CONSTRUCTION_TOLERANCE: f64 = 1e-12;

/// Spatial dimension. Two-dimensional problems are plane strain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    pub fn new(n: usize) -> Result<Self> {
        match n {
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            other => Err(Error::InvalidDimension(other)),
        }
    }

    #[inline]
    pub fn n(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }
}

impl TryFrom<usize> for Dim {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        Dim::new(n)
    }
}

#[inline]
pub(crate) fn kron(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn check_dims(expected: Dim, found: Dim) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: expected.n(),
            found: found.n(),
        })
    }
}

/// Isotropic Lamé moduli.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lame {
    pub lambda: f64,
    pub mu: f64,
}

impl Lame {
    pub fn new(lambda: f64, mu: f64) -> Self {
        Lame { lambda, mu }
    }

    /// From bulk and shear moduli; the 2D bulk modulus is `lambda + mu`.
    pub fn from_bulk_shear(bulk: f64, mu: f64, dim: Dim) -> Self {
        match dim {
            Dim::Two => Lame::new(bulk - mu, mu),
            Dim::Three => Lame::new(bulk - 2.0 * mu / 3.0, mu),
        }
    }

    pub fn from_young_poisson(young: f64, nu: f64) -> Self {
        Lame::new(
            young * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)),
            young / (2.0 * (1.0 + nu)),
        )
    }

    pub fn from_poisson_shear(nu: f64, mu: f64) -> Self {
        Lame::new(2.0 * nu * mu / (1.0 - 2.0 * nu), mu)
    }

    pub fn bulk(&self, dim: Dim) -> f64 {
        match dim {
            Dim::Two => self.lambda + self.mu,
            Dim::Three => self.lambda + 2.0 * self.mu / 3.0,
        }
    }

    /// `nu = lambda / (2 (lambda + mu))`.
    pub fn poisson(&self) -> f64 {
        self.lambda / (2.0 * (self.lambda + self.mu))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Lame::new(c * self.lambda, c * self.mu)
    }
}

/// Anything that can be acted on by an orthogonal transform.
pub trait Rotate: Sized {
    fn rotate(&self, q: &OrthogonalTransform) -> Result<Self>;

    /// Frobenius norm of the components.
    fn magnitude(&self) -> f64;

    /// Frobenius norm of the component difference.
    fn distance_to(&self, other: &Self) -> f64;
}

impl<const R: usize> Rotate for Dense<R> {
    fn rotate(&self, q: &OrthogonalTransform) -> Result<Self> {
        self.transformed(q)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn distance_to(&self, other: &Self) -> f64 {
        self.distance(other)
    }
}

macro_rules! symmetric_newtype {
    ($name:ident, $order:literal, $what:literal, $gens:expr) => {
        impl $name {
            pub const SYMMETRIES: &'static [[usize; $order]] = &$gens;

            /// Checks the index symmetries within [`CONSTRUCTION_TOLERANCE`]
            /// and enforces them exactly.
            pub fn from_dense(t: Dense<$order>) -> Result<Self> {
                let deviation = t.symmetry_deviation(Self::SYMMETRIES);
                if deviation > CONSTRUCTION_TOLERANCE {
                    return Err(Error::SymmetryViolation { what: $what, deviation });
                }
                Ok($name(t.group_average(Self::SYMMETRIES)))
            }

            pub fn from_fn(dim: Dim, f: impl FnMut([usize; $order]) -> f64) -> Result<Self> {
                Self::from_dense(Dense::from_fn(dim, f))
            }

            /// Symmetric part of an arbitrary array.
            pub fn projected(t: &Dense<$order>) -> Self {
                $name(t.group_average(Self::SYMMETRIES))
            }

            pub fn zeros(dim: Dim) -> Self {
                $name(Dense::zeros(dim))
            }

            pub fn dim(&self) -> Dim {
                self.0.dim()
            }

            #[inline]
            pub fn get(&self, idx: [usize; $order]) -> f64 {
                self.0.get(idx)
            }

            pub fn dense(&self) -> &Dense<$order> {
                &self.0
            }

            pub fn norm(&self) -> f64 {
                self.0.norm()
            }

            pub fn scaled(&self, c: f64) -> Self {
                $name(self.0.scaled(c))
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                check_dims(self.dim(), other.dim())?;
                Ok($name(self.0.add(&other.0)))
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                check_dims(self.dim(), other.dim())?;
                Ok($name(self.0.sub(&other.0)))
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.0.max_abs_diff(&other.0)
            }
        }

        impl Rotate for $name {
            fn rotate(&self, q: &OrthogonalTransform) -> Result<Self> {
                let t = self.0.transformed(q)?;
                Ok($name(t.group_average(Self::SYMMETRIES)))
            }

            fn magnitude(&self) -> f64 {
                self.0.norm()
            }

            fn distance_to(&self, other: &Self) -> f64 {
                self.0.distance(&other.0)
            }
        }
    };
}

/// Symmetric second-order tensor (inertia tensors).
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(Dense<2>);

symmetric_newtype!(SymMatrix, 2, "symmetric matrix", [[1, 0]]);

impl SymMatrix {
    /// From row-major entries.
    pub fn new(dim: Dim, rows: &[f64]) -> Result<Self> {
        Self::from_dense(Dense::from_vec(dim, rows.to_vec())?)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = Dim::new(values.len())?;
        Ok(SymMatrix(Dense::from_fn(dim, |[i, j]| if i == j { values[i] } else { 0.0 })))
    }

    /// `s * I`.
    pub fn scalar(dim: Dim, s: f64) -> Self {
        SymMatrix(Dense::from_fn(dim, |[i, j]| s * kron(i, j)))
    }

    pub fn from_square(m: &SquareMatrix) -> Result<Self> {
        let dim = Dim::new(m.size())?;
        Self::from_dense(Dense::from_vec(dim, m.as_slice().to_vec())?)
    }

    pub fn to_square(&self) -> SquareMatrix {
        let n = self.dim().n();
        SquareMatrix::from_fn(n, |i, j| self.get([i, j]))
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.get([i, j])
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim().n()).map(|i| self.get([i, i])).sum()
    }

    pub fn eigen(&self) -> SymEigen {
        sym_eigen(&self.to_square())
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        let n = self.dim().n();
        (0..n).map(|i| (0..n).map(|j| self.get([i, j])).collect()).collect()
    }
}

/// Fourth-order elastic stiffness (units of stress).
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticTensor(Dense<4>);

symmetric_newtype!(
    ElasticTensor,
    4,
    "elastic tensor",
    [[1, 0, 2, 3], [0, 1, 3, 2], [2, 3, 0, 1]]
);

impl ElasticTensor {
    /// `C_ijhk = lambda d_ij d_hk + mu (d_ih d_jk + d_ik d_jh)`.
    pub fn isotropic(moduli: Lame, dim: Dim) -> Self {
        let Lame { lambda, mu } = moduli;
        ElasticTensor(Dense::from_fn(dim, |[i, j, h, k]| {
            lambda * kron(i, j) * kron(h, k) + mu * (kron(i, h) * kron(j, k) + kron(i, k) * kron(j, h))
        }))
    }
}

/// Builds the isotropic elastic tensor, validating the dimension.
pub fn make_isotropic_elastic(lambda: f64, mu: f64, dim: usize) -> Result<ElasticTensor> {
    Ok(ElasticTensor::isotropic(Lame::new(lambda, mu), Dim::new(dim)?))
}

/// Sixth-order second-gradient stiffness (units of stress x length²).
#[derive(Debug, Clone, PartialEq)]
pub struct GradElasticTensor(Dense<6>);

symmetric_newtype!(
    GradElasticTensor,
    6,
    "second-gradient tensor",
    [[1, 0, 2, 3, 4, 5], [0, 1, 2, 4, 3, 5], [3, 4, 5, 0, 1, 2]]
);

impl GradElasticTensor {
    /// Scales every component in the symmetry orbit of `idx` by `factor`,
    /// keeping the Mindlin symmetries intact.
    pub fn with_orbit_scaled(&self, idx: [usize; 6], factor: f64) -> Self {
        let mut orbit: Vec<[usize; 6]> = alloc::vec![idx];
        let mut i = 0;
        while i < orbit.len() {
            for g in Self::SYMMETRIES {
                let next = g.map(|p| orbit[i][p]);
                if !orbit.contains(&next) {
                    orbit.push(next);
                }
            }
            i += 1;
        }
        let mut t = self.0.clone();
        for o in orbit {
            t.set(o, factor * t.get(o));
        }
        GradElasticTensor(t)
    }
}

/// Coefficients `beta_ijk` of the quadratic displacement `u_i = beta_ijk x_j x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCoefficients(Dense<3>);

symmetric_newtype!(QuadraticCoefficients, 3, "quadratic coefficients", [[0, 2, 1]]);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_components() {
        let c = make_isotropic_elastic(0.0, 1.0, 2).unwrap();
        assert_eq!(c.get([0, 0, 0, 0]), 2.0);
        assert_eq!(c.get([0, 0, 1, 1]), 0.0);
        assert_eq!(c.get([0, 1, 0, 1]), 1.0);

        let c = make_isotropic_elastic(1.0, 1.0, 2).unwrap();
        assert_eq!(c.get([0, 0, 0, 0]), 3.0);
        assert_eq!(c.get([0, 0, 1, 1]), 1.0);
        assert_eq!(c.get([0, 1, 0, 1]), 1.0);

        let c = make_isotropic_elastic(0.0, 0.0, 3).unwrap();
        assert_eq!(c.norm(), 0.0);
    }

    #[test]
    fn invalid_dimension_is_rejected() {
        assert_eq!(make_isotropic_elastic(1.0, 1.0, 4), Err(Error::InvalidDimension(4)));
        assert_eq!(Dim::new(1), Err(Error::InvalidDimension(1)));
    }

    #[test]
    fn construction_rejects_broken_symmetry() {
        let err = ElasticTensor::from_fn(Dim::Two, |[i, j, h, k]| (i + 2 * j + h + k) as f64).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolation { .. }));
        let err = SymMatrix::new(Dim::Two, &[1.0, 0.5, 0.4, 1.0]).unwrap_err();
        assert!(matches!(err, Error::SymmetryViolation { .. }));
    }

    #[test]
    fn construction_enforces_exact_symmetry() {
        let c = ElasticTensor::from_fn(Dim::Three, |[i, j, h, k]| {
            1.0 + kron(i, j) * kron(h, k) + 1e-14 * (i as f64)
        })
        .unwrap();
        for idx in indices::<4>(Dim::Three) {
            let [i, j, h, k] = idx;
            assert_eq!(c.get(idx), c.get([j, i, h, k]));
            assert_eq!(c.get(idx), c.get([h, k, i, j]));
        }
    }

    #[test]
    fn orbit_scaling_preserves_symmetry() {
        let a = GradElasticTensor::from_fn(Dim::Two, |_| 1.0).unwrap();
        let b = a.with_orbit_scaled([0, 1, 0, 1, 1, 1], 1.1);
        assert!(GradElasticTensor::from_dense(b.dense().clone()).is_ok());
        assert!((b.get([1, 0, 0, 1, 1, 1]) - 1.1).abs() < 1e-15);
        assert!((b.get([1, 1, 1, 1, 0, 0]) - 1.1).abs() < 1e-15);
        assert_eq!(b.get([0, 0, 0, 0, 0, 0]), 1.0);
    }

    #[test]
    fn lame_conversions() {
        let m = Lame::from_bulk_shear(2.0, 1.0, Dim::Two);
        assert_eq!((m.lambda, m.mu), (1.0, 1.0));
        assert_eq!(m.poisson(), 0.25);
        let m = Lame::from_poisson_shear(0.25, 1.0);
        assert_eq!(m.lambda, 1.0);
        let m = Lame::from_young_poisson(2.5, 0.25);
        assert!((m.mu - 1.0).abs() < 1e-15 && (m.lambda - 1.0).abs() < 1e-15);
        assert!((Lame::new(1.0, 1.5).bulk(Dim::Three) - 2.0).abs() < 1e-15);
    }
}
