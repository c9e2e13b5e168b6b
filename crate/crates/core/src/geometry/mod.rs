//! Static moments, Euler tensors of inertia and their normalized forms.
//!
//! All shapes are centred at the origin, so the static moment of every
//! constructed shape vanishes. The Euler tensor is `E(V) = int_V x (x) x`
//! and the normalized inertia is `B(V) = E(V) / Omega_RVE`.

mod microstructure;
mod monte_carlo;
mod polygon;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

pub use microstructure::{rve_inertia_decomposition, InertiaDecomposition, Microstructure, Phase, DEFAULT_DILUTE_THRESHOLD};
pub use monte_carlo::{monte_carlo_inertia, MonteCarloInertia, MIN_SAMPLES};
pub use polygon::{Polygon, PolygonMoments, CENTROID_TOLERANCE};

use crate::math::sqrt;
use crate::tensor::{Dim, OrthogonalTransform, Rotate, SymMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeKind {
    Rectangle { h1: f64, h2: f64 },
    Box { h1: f64, h2: f64, h3: f64 },
    Circle { r: f64 },
    Ellipse { b1: f64, b2: f64 },
    Sphere { r: f64 },
    Ellipsoid { b1: f64, b2: f64, b3: f64 },
    Polygon(Polygon),
}

impl ShapeKind {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeKind::Rectangle { .. } => "rectangle",
            ShapeKind::Box { .. } => "box",
            ShapeKind::Circle { .. } => "circle",
            ShapeKind::Ellipse { .. } => "ellipse",
            ShapeKind::Sphere { .. } => "sphere",
            ShapeKind::Ellipsoid { .. } => "ellipsoid",
            ShapeKind::Polygon(_) => "polygon",
        }
    }
}

/// A centred region, optionally rotated: `x = Q x_local`.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    kind: ShapeKind,
    orientation: Option<OrthogonalTransform>,
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            reason: "length must be positive and finite",
        })
    }
}

impl Shape {
    fn plain(kind: ShapeKind) -> Self {
        Shape { kind, orientation: None }
    }

    pub fn rectangle(h1: f64, h2: f64) -> Result<Self> {
        Ok(Self::plain(ShapeKind::Rectangle {
            h1: positive("h1", h1)?,
            h2: positive("h2", h2)?,
        }))
    }

    pub fn square(h: f64) -> Result<Self> {
        Self::rectangle(h, h)
    }

    pub fn cuboid(h1: f64, h2: f64, h3: f64) -> Result<Self> {
        Ok(Self::plain(ShapeKind::Box {
            h1: positive("h1", h1)?,
            h2: positive("h2", h2)?,
            h3: positive("h3", h3)?,
        }))
    }

    pub fn circle(r: f64) -> Result<Self> {
        Ok(Self::plain(ShapeKind::Circle { r: positive("r", r)? }))
    }

    pub fn ellipse(b1: f64, b2: f64) -> Result<Self> {
        Ok(Self::plain(ShapeKind::Ellipse {
            b1: positive("b1", b1)?,
            b2: positive("b2", b2)?,
        }))
    }

    pub fn sphere(r: f64) -> Result<Self> {
        Ok(Self::plain(ShapeKind::Sphere { r: positive("r", r)? }))
    }

    pub fn ellipsoid(b1: f64, b2: f64, b3: f64) -> Result<Self> {
        Ok(Self::plain(ShapeKind::Ellipsoid {
            b1: positive("b1", b1)?,
            b2: positive("b2", b2)?,
            b3: positive("b3", b3)?,
        }))
    }

    /// Counter-clockwise vertices; the centroid must be the origin.
    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        Ok(Self::plain(ShapeKind::Polygon(Polygon::new(vertices)?)))
    }

    pub fn kind(&self) -> &ShapeKind {
        &self.kind
    }

    pub fn orientation(&self) -> Option<&OrthogonalTransform> {
        self.orientation.as_ref()
    }

    pub fn dim(&self) -> Dim {
        match self.kind {
            ShapeKind::Rectangle { .. } | ShapeKind::Circle { .. } | ShapeKind::Ellipse { .. } | ShapeKind::Polygon(_) => {
                Dim::Two
            }
            ShapeKind::Box { .. } | ShapeKind::Sphere { .. } | ShapeKind::Ellipsoid { .. } => Dim::Three,
        }
    }

    /// The same shape turned by `q` about the origin.
    pub fn rotated(&self, q: &OrthogonalTransform) -> Result<Self> {
        if q.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim().n(),
                found: q.dim().n(),
            });
        }
        let orientation = match &self.orientation {
            Some(o) => q.compose(o),
            None => q.clone(),
        };
        Ok(Shape {
            kind: self.kind.clone(),
            orientation: Some(orientation),
        })
    }

    /// Uniform scaling of all lengths by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let c = positive("scale", c)?;
        let kind = match &self.kind {
            ShapeKind::Rectangle { h1, h2 } => ShapeKind::Rectangle { h1: c * h1, h2: c * h2 },
            ShapeKind::Box { h1, h2, h3 } => ShapeKind::Box {
                h1: c * h1,
                h2: c * h2,
                h3: c * h3,
            },
            ShapeKind::Circle { r } => ShapeKind::Circle { r: c * r },
            ShapeKind::Ellipse { b1, b2 } => ShapeKind::Ellipse { b1: c * b1, b2: c * b2 },
            ShapeKind::Sphere { r } => ShapeKind::Sphere { r: c * r },
            ShapeKind::Ellipsoid { b1, b2, b3 } => ShapeKind::Ellipsoid {
                b1: c * b1,
                b2: c * b2,
                b3: c * b3,
            },
            ShapeKind::Polygon(p) => ShapeKind::Polygon(p.scaled(c)),
        };
        Ok(Shape {
            kind,
            orientation: self.orientation.clone(),
        })
    }

    /// Area (2D) or volume (3D).
    pub fn measure(&self) -> f64 {
        match &self.kind {
            ShapeKind::Rectangle { h1, h2 } => h1 * h2,
            ShapeKind::Box { h1, h2, h3 } => h1 * h2 * h3,
            ShapeKind::Circle { r } => PI * r * r,
            ShapeKind::Ellipse { b1, b2 } => PI * b1 * b2,
            ShapeKind::Sphere { r } => 4.0 * PI * r * r * r / 3.0,
            ShapeKind::Ellipsoid { b1, b2, b3 } => 4.0 * PI * b1 * b2 * b3 / 3.0,
            ShapeKind::Polygon(p) => p.moments().area,
        }
    }

    fn local_euler(&self) -> SymMatrix {
        let diag = |d: &[f64]| SymMatrix::diagonal(d).expect("catalog dimension");
        match &self.kind {
            ShapeKind::Rectangle { h1, h2 } => {
                let a = h1 * h2;
                diag(&[a * h1 * h1 / 12.0, a * h2 * h2 / 12.0])
            }
            ShapeKind::Box { h1, h2, h3 } => {
                let v = h1 * h2 * h3;
                diag(&[v * h1 * h1 / 12.0, v * h2 * h2 / 12.0, v * h3 * h3 / 12.0])
            }
            ShapeKind::Circle { r } => SymMatrix::scalar(Dim::Two, PI * r * r * r * r / 4.0),
            ShapeKind::Ellipse { b1, b2 } => {
                let q = PI * b1 * b2 / 4.0;
                diag(&[q * b1 * b1, q * b2 * b2])
            }
            ShapeKind::Sphere { r } => SymMatrix::scalar(Dim::Three, 4.0 * PI * r * r * r * r * r / 15.0),
            ShapeKind::Ellipsoid { b1, b2, b3 } => {
                let v5 = 4.0 * PI * b1 * b2 * b3 / 15.0;
                diag(&[v5 * b1 * b1, v5 * b2 * b2, v5 * b3 * b3])
            }
            ShapeKind::Polygon(p) => {
                let m = p.moments();
                SymMatrix::new(Dim::Two, &[m.second[0], m.second[1], m.second[1], m.second[2]])
                    .expect("polygon moments are symmetric")
            }
        }
    }

    fn local_static_moment(&self) -> Vec<f64> {
        match &self.kind {
            ShapeKind::Polygon(p) => p.moments().first.to_vec(),
            _ => vec![0.0; self.dim().n()],
        }
    }

    /// Whether `x` (global coordinates) lies inside the shape.
    pub fn contains(&self, x: &[f64]) -> bool {
        let local = match &self.orientation {
            Some(q) => q.transpose().apply(x),
            None => x.to_vec(),
        };
        let sq = |v: f64| v * v;
        match &self.kind {
            ShapeKind::Rectangle { h1, h2 } => local[0].abs() <= h1 / 2.0 && local[1].abs() <= h2 / 2.0,
            ShapeKind::Box { h1, h2, h3 } => {
                local[0].abs() <= h1 / 2.0 && local[1].abs() <= h2 / 2.0 && local[2].abs() <= h3 / 2.0
            }
            ShapeKind::Circle { r } => sq(local[0]) + sq(local[1]) <= r * r,
            ShapeKind::Ellipse { b1, b2 } => sq(local[0] / b1) + sq(local[1] / b2) <= 1.0,
            ShapeKind::Sphere { r } => local.iter().map(|v| v * v).sum::<f64>() <= r * r,
            ShapeKind::Ellipsoid { b1, b2, b3 } => {
                sq(local[0] / b1) + sq(local[1] / b2) + sq(local[2] / b3) <= 1.0
            }
            ShapeKind::Polygon(p) => p.contains([local[0], local[1]]),
        }
    }

    /// Global axis-aligned box `(centre, half extents)` enclosing the shape.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let (centre, half): (Vec<f64>, Vec<f64>) = match &self.kind {
            ShapeKind::Rectangle { h1, h2 } => (vec![0.0; 2], vec![h1 / 2.0, h2 / 2.0]),
            ShapeKind::Box { h1, h2, h3 } => (vec![0.0; 3], vec![h1 / 2.0, h2 / 2.0, h3 / 2.0]),
            ShapeKind::Circle { r } => (vec![0.0; 2], vec![*r, *r]),
            ShapeKind::Ellipse { b1, b2 } => (vec![0.0; 2], vec![*b1, *b2]),
            ShapeKind::Sphere { r } => (vec![0.0; 3], vec![*r; 3]),
            ShapeKind::Ellipsoid { b1, b2, b3 } => (vec![0.0; 3], vec![*b1, *b2, *b3]),
            ShapeKind::Polygon(p) => {
                let (lo, hi) = p.bounds();
                (
                    vec![(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0],
                    vec![(hi[0] - lo[0]) / 2.0, (hi[1] - lo[1]) / 2.0],
                )
            }
        };
        match &self.orientation {
            None => (centre, half),
            Some(q) => {
                let n = centre.len();
                let c = q.apply(&centre);
                let h = (0..n).map(|i| (0..n).map(|j| q.get(i, j).abs() * half[j]).sum()).collect();
                (c, h)
            }
        }
    }
}

/// `S(V) = int_V x`; zero for every admissible shape up to rounding.
pub fn static_moment(s: &Shape) -> Vec<f64> {
    let local = s.local_static_moment();
    match s.orientation() {
        Some(q) => q.apply(&local),
        None => local,
    }
}

/// `E(V) = int_V x (x) x` by closed form or exact polygon quadrature.
pub fn euler_tensor(s: &Shape) -> SymMatrix {
    let local = s.local_euler();
    match s.orientation() {
        Some(q) => local.rotate(q).expect("orientation matches shape dimension"),
        None => local,
    }
}

/// `B = E(V) / Omega_RVE`.
pub fn normalized_inertia(s: &Shape, rve_measure: f64) -> Result<SymMatrix> {
    if !(rve_measure.is_finite() && rve_measure > 0.0) {
        return Err(Error::InvalidParameter {
            name: "RVE measure",
            value: rve_measure,
            reason: "must be positive",
        });
    }
    Ok(euler_tensor(s).scaled(1.0 / rve_measure))
}

/// Radii of gyration and principal axes of a normalized inertia tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalInertia {
    /// `rho_k^2`, descending.
    pub radii_squared: Vec<f64>,
    /// Right-handed frame; column `k` is `e_[k]`.
    pub axes: OrthogonalTransform,
    /// All radii equal (any orthonormal frame is principal).
    pub spherical: bool,
}

impl PrincipalInertia {
    pub const NEGATIVE_TOLERANCE: f64 = 1e-13;
    pub const SPHERICAL_TOLERANCE: f64 = 1e-12;

    pub fn radii(&self) -> Vec<f64> {
        self.radii_squared.iter().map(|r| sqrt(r.max(0.0))).collect()
    }

    pub fn axis(&self, k: usize) -> Vec<f64> {
        self.axes.column(k)
    }

    /// `sum_k rho_k^2 e_[k] (x) e_[k]`.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.radii_squared.len();
        let dim = self.axes.dim();
        let rows: Vec<f64> = (0..n * n)
            .map(|ij| {
                let (i, j) = (ij / n, ij % n);
                (0..n)
                    .map(|k| self.radii_squared[k] * self.axes.get(i, k) * self.axes.get(j, k))
                    .sum()
            })
            .collect();
        SymMatrix::new(dim, &rows).expect("reconstruction is symmetric")
    }
}

/// Eigen-decomposition of `B` with descending radii and right-handed axes.
/// Each axis is signed so that its largest component is positive, except
/// that the last axis absorbs any sign flip needed for handedness.
pub fn principal_inertia(b: &SymMatrix) -> Result<PrincipalInertia> {
    let eig = b.eigen();
    let scale = eig.max_abs();
    if eig.min() < -PrincipalInertia::NEGATIVE_TOLERANCE * scale {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: eig.min(),
        });
    }
    let n = b.dim().n();
    let mut vecs = eig.vectors.clone();
    for k in 0..n {
        let lead = (0..n)
            .max_by(|&p, &q| vecs.get(p, k).abs().total_cmp(&vecs.get(q, k).abs()))
            .unwrap_or(0);
        if vecs.get(lead, k) < 0.0 {
            for i in 0..n {
                vecs.set(i, k, -vecs.get(i, k));
            }
        }
    }
    if vecs.determinant() < 0.0 {
        for i in 0..n {
            vecs.set(i, n - 1, -vecs.get(i, n - 1));
        }
    }
    let spherical = eig.max() - eig.min() <= PrincipalInertia::SPHERICAL_TOLERANCE * scale;
    Ok(PrincipalInertia {
        radii_squared: eig.values.iter().map(|v| v.max(0.0)).collect(),
        axes: OrthogonalTransform::from_matrix_unchecked(b.dim(), vecs),
        spherical,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InertiaSummary {
    pub measure: f64,
    pub static_moment: Vec<f64>,
    pub euler: SymMatrix,
    pub normalized: SymMatrix,
    pub principal: PrincipalInertia,
}

pub fn inertia_summary(s: &Shape, rve_measure: f64) -> Result<InertiaSummary> {
    let normalized = normalized_inertia(s, rve_measure)?;
    Ok(InertiaSummary {
        measure: s.measure(),
        static_moment: static_moment(s),
        euler: euler_tensor(s),
        principal: principal_inertia(&normalized)?,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_6;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn euler_closed_forms() {
        let e = euler_tensor(&Shape::rectangle(2.0, 1.0).unwrap());
        assert!(close(e.entry(0, 0), 2.0 / 3.0, 1e-15) && close(e.entry(1, 1), 1.0 / 6.0, 1e-15));
        assert_eq!(e.entry(0, 1), 0.0);

        let e = euler_tensor(&Shape::circle(1.0).unwrap());
        assert!(close(e.entry(0, 0), PI / 4.0, 1e-15) && close(e.entry(1, 1), PI / 4.0, 1e-15));

        let e = euler_tensor(&Shape::square(1.0).unwrap());
        assert!(close(e.entry(0, 0), 1.0 / 12.0, 1e-15) && close(e.entry(1, 1), 1.0 / 12.0, 1e-15));

        let e = euler_tensor(&Shape::sphere(0.5).unwrap());
        assert!(close(e.entry(2, 2), 4.0 * PI * 0.5f64.powi(5) / 15.0, 1e-15));
    }

    #[test]
    fn static_moment_of_centred_shapes_vanishes() {
        assert_eq!(static_moment(&Shape::rectangle(2.0, 1.0).unwrap()), vec![0.0, 0.0]);
        assert_eq!(static_moment(&Shape::circle(1.0).unwrap()), vec![0.0, 0.0]);
        let hex: Vec<[f64; 2]> = (0..6)
            .map(|k| {
                let t = k as f64 * PI / 3.0;
                [crate::math::cos(t), crate::math::sin(t)]
            })
            .collect();
        let s = static_moment(&Shape::polygon(hex).unwrap());
        assert!(s.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn normalized_rectangle_is_its_own_rve() {
        let r = Shape::rectangle(2.0, 1.0).unwrap();
        let b = normalized_inertia(&r, r.measure()).unwrap();
        assert!(close(b.entry(0, 0), 1.0 / 3.0, 1e-15) && close(b.entry(1, 1), 1.0 / 12.0, 1e-15));
        assert!(normalized_inertia(&r, 0.0).is_err());
        assert!(normalized_inertia(&r, -1.0).is_err());
    }

    #[test]
    fn sphere_in_box_is_scalar() {
        let s = Shape::sphere(0.1).unwrap();
        let v = 2.0 * 1.5 * 1.0;
        let b = normalized_inertia(&s, v).unwrap();
        let expect = 4.0 * PI * 0.1f64.powi(5) / 15.0 / v;
        for i in 0..3 {
            assert!(close(b.entry(i, i), expect, 1e-14));
        }
    }

    #[test]
    fn principal_of_diagonal() {
        let b = SymMatrix::diagonal(&[1.0 / 3.0, 1.0 / 12.0]).unwrap();
        let p = principal_inertia(&b).unwrap();
        assert_eq!(p.radii_squared, vec![1.0 / 3.0, 1.0 / 12.0]);
        assert_eq!(p.axis(0), vec![1.0, 0.0]);
        assert_eq!(p.axis(1), vec![0.0, 1.0]);
        assert!(!p.spherical);
    }

    #[test]
    fn principal_of_scalar_is_spherical() {
        let p = principal_inertia(&SymMatrix::scalar(Dim::Three, 0.25)).unwrap();
        assert!(p.spherical);
        assert!(p.radii_squared.iter().all(|r| close(*r, 0.25, 1e-15)));
        assert!((p.axes.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn principal_of_rotated_tensor() {
        let b = SymMatrix::diagonal(&[1.0 / 3.0, 1.0 / 12.0]).unwrap();
        let q = OrthogonalTransform::rotation_2d(FRAC_PI_6);
        let p = principal_inertia(&b.rotate(&q).unwrap()).unwrap();
        assert!(close(p.radii_squared[0], 1.0 / 3.0, 1e-14));
        assert!(close(p.radii_squared[1], 1.0 / 12.0, 1e-14));
        let e0 = p.axis(0);
        assert!((e0[0] - crate::math::cos(FRAC_PI_6)).abs() < 1e-14);
        assert!((e0[1] - crate::math::sin(FRAC_PI_6)).abs() < 1e-14);
        assert!(p.reconstruct().max_abs_diff(&b.rotate(&q).unwrap()) < 1e-13);
    }

    #[test]
    fn negative_inertia_is_rejected() {
        let b = SymMatrix::diagonal(&[1.0, -0.5]).unwrap();
        assert!(matches!(principal_inertia(&b), Err(Error::NotPositiveSemidefinite { .. })));
    }

    #[test]
    fn non_positive_lengths_are_rejected() {
        assert!(Shape::rectangle(0.0, 1.0).is_err());
        assert!(Shape::circle(-1.0).is_err());
        assert!(Shape::ellipse(1.0, f64::NAN).is_err());
    }

    #[test]
    fn rotated_contains_and_bounds() {
        let q = OrthogonalTransform::rotation_2d(core::f64::consts::FRAC_PI_2);
        let s = Shape::rectangle(2.0, 0.5).unwrap().rotated(&q).unwrap();
        assert!(s.contains(&[0.0, 0.9]));
        assert!(!s.contains(&[0.9, 0.0]));
        let (_, half) = s.bounding_box();
        assert!(close(half[1], 1.0, 1e-15));
    }
}
