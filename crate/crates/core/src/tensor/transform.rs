use alloc::vec::Vec;

use rand::Rng;

use super::Dim;
use crate::linalg::SquareMatrix;
use crate::math::{cos, sin, sqrt};
use crate::{Error, Result};

/// Orthogonal matrix `Q` acting on tensors by one contraction per index.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalTransform {
    dim: Dim,
    q: SquareMatrix,
}

impl OrthogonalTransform {
    pub const TOLERANCE: f64 = 1e-12;

    /// Validates `Q^T Q = I` within [`Self::TOLERANCE`].
    pub fn new(dim: Dim, rows: &[f64]) -> Result<Self> {
        let n = dim.n();
        if rows.len() != n * n {
            return Err(Error::ComponentCount {
                expected: n * n,
                found: rows.len(),
            });
        }
        let q = SquareMatrix::from_fn(n, |i, j| rows[i * n + j]);
        let qtq = q.transpose().mul(&q);
        let dev = SquareMatrix::from_fn(n, |i, j| qtq.get(i, j) - if i == j { 1.0 } else { 0.0 }).max_abs();
        if dev > Self::TOLERANCE {
            return Err(Error::NotOrthogonal { deviation: dev });
        }
        Ok(OrthogonalTransform { dim, q })
    }

    pub(crate) fn from_matrix_unchecked(dim: Dim, q: SquareMatrix) -> Self {
        OrthogonalTransform { dim, q }
    }

    pub fn identity(dim: Dim) -> Self {
        OrthogonalTransform {
            dim,
            q: SquareMatrix::identity(dim.n()),
        }
    }

    /// Counter-clockwise rotation by `angle` radians in the plane.
    pub fn rotation_2d(angle: f64) -> Self {
        let (s, c) = (sin(angle), cos(angle));
        OrthogonalTransform {
            dim: Dim::Two,
            q: SquareMatrix::from_fn(2, |i, j| [[c, -s], [s, c]][i][j]),
        }
    }

    /// Rotation by `angle` about coordinate axis `axis` (0-based) in 3D.
    pub fn axis_rotation_3d(axis: usize, angle: f64) -> Self {
        let (s, c) = (sin(angle), cos(angle));
        let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
        let mut q = SquareMatrix::identity(3);
        q.set(a, a, c);
        q.set(a, b, -s);
        q.set(b, a, s);
        q.set(b, b, c);
        OrthogonalTransform { dim: Dim::Three, q }
    }

    /// Rotation about the plane normal (2D) or the third axis (3D).
    pub fn in_plane_rotation(dim: Dim, angle: f64) -> Self {
        match dim {
            Dim::Two => Self::rotation_2d(angle),
            Dim::Three => Self::axis_rotation_3d(2, angle),
        }
    }

    /// Reflection `x_axis -> -x_axis`.
    pub fn reflection(dim: Dim, axis: usize) -> Self {
        let mut q = SquareMatrix::identity(dim.n());
        q.set(axis, axis, -1.0);
        OrthogonalTransform { dim, q }
    }

    /// Rotation from a (not necessarily normalized) quaternion `w + xi + yj + zk`.
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = sqrt(w * w + x * x + y * y + z * z);
        if norm == 0.0 {
            return Err(Error::InvalidParameter {
                name: "quaternion norm",
                value: 0.0,
                reason: "must be nonzero",
            });
        }
        let (w, x, y, z) = (w / norm, x / norm, y / norm, z / norm);
        let m = [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ];
        Ok(OrthogonalTransform {
            dim: Dim::Three,
            q: SquareMatrix::from_fn(3, |i, j| m[i][j]),
        })
    }

    /// Uniformly distributed proper rotation.
    pub fn random<R: Rng + ?Sized>(dim: Dim, rng: &mut R) -> Self {
        match dim {
            Dim::Two => Self::rotation_2d(rng.random::<f64>() * core::f64::consts::TAU),
            Dim::Three => loop {
                // Rejection sampling in the unit 4-ball gives a uniform unit quaternion.
                let v: [f64; 4] = core::array::from_fn(|_| 2.0 * rng.random::<f64>() - 1.0);
                let r2: f64 = v.iter().map(|c| c * c).sum();
                if r2 > 1e-6 && r2 <= 1.0 {
                    break Self::from_quaternion(v[0], v[1], v[2], v[3]).expect("nonzero quaternion");
                }
            },
        }
    }

    /// Orthonormal frame whose columns are the given axes. Rows of the
    /// returned transform map global components to frame components.
    pub fn from_axes(dim: Dim, axes: &[Vec<f64>]) -> Result<Self> {
        let n = dim.n();
        if axes.len() != n || axes.iter().any(|a| a.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: axes.len(),
            });
        }
        let rows: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| axes[j][i]).collect();
        Self::new(dim, &rows)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q.get(i, j)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.q
    }

    /// Column `k`, i.e. the image of the `k`-th coordinate axis.
    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.dim.n()).map(|i| self.q.get(i, k)).collect()
    }

    pub fn transpose(&self) -> Self {
        OrthogonalTransform {
            dim: self.dim,
            q: self.q.transpose(),
        }
    }

    /// `self * other`.
    pub fn compose(&self, other: &Self) -> Self {
        OrthogonalTransform {
            dim: self.dim,
            q: self.q.mul(&other.q),
        }
    }

    pub fn determinant(&self) -> f64 {
        self.q.determinant()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.q.mul_vec(x)
    }
}
