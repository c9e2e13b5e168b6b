//! First-order discrepancy tensors `C~ = (C_eq - C1) / f`.
//!
//! Closed forms are available for a circular inclusion (2D, plane strain),
//! a spherical inclusion (3D) and an elliptic hole (2D). Their isotropic
//! moduli are chosen so that `a2 = -f rho^2 lambda~ / 2` and
//! `a4 = -f rho^2 mu~ / 2` reproduce the published nonlocal parameters.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::homogenization::NonlocalParams;
use crate::math::relative;
use crate::tensor::{
    is_positive_definite, kron, Dim, ElasticTensor, Lame, OrthogonalTransform, Rotate,
};
use crate::{Error, Result, Warning, WarningCode};

const ISOTROPY_TOLERANCE: f64 = 1e-9;

/// `C~ = lambda~ d_ij d_hk + mu~ (d_ih d_jk + d_ik d_jh)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicDiscrepancy {
    pub lambda: f64,
    pub mu: f64,
    pub dim: Dim,
}

impl IsotropicDiscrepancy {
    pub fn new(lambda: f64, mu: f64, dim: Dim) -> Self {
        IsotropicDiscrepancy { lambda, mu, dim }
    }

    /// `lambda~ + mu~` in 2D, `lambda~ + 2 mu~ / 3` in 3D.
    pub fn bulk(&self) -> f64 {
        Lame::new(self.lambda, self.mu).bulk(self.dim)
    }

    pub fn to_tensor(&self) -> ElasticTensor {
        ElasticTensor::isotropic(Lame::new(self.lambda, self.mu), self.dim)
    }

    /// Reads `lambda~ = C_1122`, `mu~ = C_1212` and checks that the
    /// isotropic tensor built from them reproduces `c`.
    pub fn from_tensor(c: &ElasticTensor) -> Result<Self> {
        let d = IsotropicDiscrepancy::new(c.get([0, 0, 1, 1]), c.get([0, 1, 0, 1]), c.dim());
        let dev = relative(d.to_tensor().max_abs_diff(c), c.dense().max_abs());
        if dev > ISOTROPY_TOLERANCE {
            return Err(Error::SymmetryViolation {
                what: "isotropic discrepancy",
                deviation: dev,
            });
        }
        Ok(d)
    }
}

/// Isotropic part plus the shear-coupling `xi~` and axial `omega~` terms
/// of a 2D orthotropic discrepancy, written in its orthotropy frame.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthotropicDiscrepancy {
    pub lambda: f64,
    pub mu: f64,
    pub xi: f64,
    pub omega: f64,
    /// Columns are the orthotropy axes in global coordinates.
    pub axes: OrthogonalTransform,
}

impl OrthotropicDiscrepancy {
    pub fn dim(&self) -> Dim {
        self.axes.dim()
    }

    pub fn with_axes(mut self, axes: OrthogonalTransform) -> Result<Self> {
        if axes.dim() != self.axes.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.axes.dim().n(),
                found: axes.dim().n(),
            });
        }
        self.axes = axes;
        Ok(self)
    }

    pub fn isotropic_part(&self) -> IsotropicDiscrepancy {
        IsotropicDiscrepancy::new(self.lambda, self.mu, self.dim())
    }

    pub fn bulk(&self) -> f64 {
        self.isotropic_part().bulk()
    }

    /// Components in the orthotropy frame.
    pub fn local_tensor(&self) -> ElasticTensor {
        let shear = |a: usize, b: usize| kron(a, 0) * kron(b, 1) + kron(a, 1) * kron(b, 0);
        let Self { lambda, mu, xi, omega, .. } = *self;
        ElasticTensor::from_fn(self.dim(), |[i, j, h, k]| {
            lambda * kron(i, j) * kron(h, k)
                + mu * (kron(i, h) * kron(j, k) + kron(i, k) * kron(j, h))
                + xi * shear(i, j) * shear(h, k)
                + omega * kron(i, 0) * kron(j, 0) * kron(h, 0) * kron(k, 0)
        })
        .expect("orthotropic kernel is symmetric")
    }

    pub fn to_tensor(&self) -> ElasticTensor {
        self.local_tensor()
            .rotate(&self.axes)
            .expect("axes match dimension")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Discrepancy {
    Isotropic(IsotropicDiscrepancy),
    Orthotropic(OrthotropicDiscrepancy),
    Full(ElasticTensor),
}

impl Discrepancy {
    pub fn dim(&self) -> Dim {
        match self {
            Discrepancy::Isotropic(d) => d.dim,
            Discrepancy::Orthotropic(d) => d.dim(),
            Discrepancy::Full(c) => c.dim(),
        }
    }

    pub fn to_full_tensor(&self) -> ElasticTensor {
        match self {
            Discrepancy::Isotropic(d) => d.to_tensor(),
            Discrepancy::Orthotropic(d) => d.to_tensor(),
            Discrepancy::Full(c) => c.clone(),
        }
    }

    /// Orthotropy axes, if the model carries any.
    pub fn axes(&self) -> Option<&OrthogonalTransform> {
        match self {
            Discrepancy::Orthotropic(d) => Some(&d.axes),
            _ => None,
        }
    }
}

impl From<IsotropicDiscrepancy> for Discrepancy {
    fn from(d: IsotropicDiscrepancy) -> Self {
        Discrepancy::Isotropic(d)
    }
}

impl From<OrthotropicDiscrepancy> for Discrepancy {
    fn from(d: OrthotropicDiscrepancy) -> Self {
        Discrepancy::Orthotropic(d)
    }
}

/// `C~ = (C_eq - C1) / f`.
pub fn from_effective(c_eq: &ElasticTensor, c1: &ElasticTensor, f: f64) -> Result<ElasticTensor> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::InvalidParameter {
            name: "f",
            value: f,
            reason: "volume fraction must be positive",
        });
    }
    Ok(c_eq.sub(c1)?.scaled(1.0 / f))
}

fn check_matrix(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            reason: "matrix modulus must be positive",
        })
    }
}

fn check_inclusion(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            reason: "inclusion modulus must be non-negative",
        })
    }
}

fn nonzero(what: &'static str, d: f64) -> Result<f64> {
    if d == 0.0 || !d.is_finite() {
        Err(Error::ZeroDenominator(what))
    } else {
        Ok(d)
    }
}

/// Circular inclusion (bulk `K = lambda + mu`, plane strain); a void is
/// `K2 = mu2 = 0`.
pub fn circular_inclusion(k1: f64, mu1: f64, k2: f64, mu2: f64) -> Result<IsotropicDiscrepancy> {
    check_matrix("K1", k1)?;
    check_matrix("mu1", mu1)?;
    check_inclusion("K2", k2)?;
    check_inclusion("mu2", mu2)?;
    let bulk_term = (k1 - k2) * (k1 + mu1) / nonzero("K2 + mu1", k2 + mu1)?;
    let shear_term =
        mu1 * (mu1 - mu2) * (k1 + mu1) / nonzero("2 mu1 mu2 + K1 (mu1 + mu2)", 2.0 * mu1 * mu2 + k1 * (mu1 + mu2))?;
    Ok(IsotropicDiscrepancy::new(-(bulk_term - shear_term), -shear_term, Dim::Two))
}

/// Discrepancy of a spherical inclusion together with any consistency warning.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalInclusion {
    pub discrepancy: IsotropicDiscrepancy,
    pub warnings: Vec<Warning>,
}

/// Spherical inclusion (bulk `K = lambda + 2 mu / 3`).
///
/// The published shear term carries `(mu2 - mu1)`, which makes `mu~ > 0` for
/// a softer inclusion. `erratum_sign = true` uses `(mu1 - mu2)` instead,
/// matching the 2D form. The bulk discrepancy `K~` is the same either way
/// and is positive for a softer inclusion.
pub fn spherical_inclusion(k1: f64, mu1: f64, k2: f64, mu2: f64, erratum_sign: bool) -> Result<SphericalInclusion> {
    check_matrix("K1", k1)?;
    check_matrix("mu1", mu1)?;
    check_inclusion("K2", k2)?;
    check_inclusion("mu2", mu2)?;
    let stiff = 3.0 * k1 + 4.0 * mu1;
    let bulk_term = stiff * (k2 - k1) / nonzero("3 K2 + 4 mu1", 3.0 * k2 + 4.0 * mu1)?;
    let shear_diff = if erratum_sign { mu1 - mu2 } else { mu2 - mu1 };
    let shear_den = nonzero(
        "mu1 (3 K1 + 4 mu2) + 2 (3 K1 + 4 mu1)(mu2 + mu1)",
        mu1 * (3.0 * k1 + 4.0 * mu2) + 2.0 * stiff * (mu2 + mu1),
    )?;
    let shear_term = 5.0 * mu1 * shear_diff * stiff / shear_den;
    let discrepancy = IsotropicDiscrepancy::new(-(bulk_term - 2.0 * shear_term / 3.0), -shear_term, Dim::Three);

    let mut warnings = Vec::new();
    if !erratum_sign && mu1 != mu2 {
        warnings.push(Warning::new(
            WarningCode::SphericalSignConflict,
            format!(
                "literal spherical-inclusion shear term gives mu_tilde = {:e} for mu2 {} mu1, the opposite sign \
                 to the 2D form; negative definiteness of the discrepancy fails for softer inclusions \
                 (set erratum_sign to flip the shear factor)",
                discrepancy.mu,
                if mu2 < mu1 { "<" } else { ">" },
            ),
        ));
    }
    Ok(SphericalInclusion { discrepancy, warnings })
}

/// Elliptic hole with semi-axis ratio `Lambda = b2 / b1` in `(0, 1]`, the
/// major axis along the first frame axis (plane strain).
pub fn elliptic_hole(matrix: Lame, ratio: f64) -> Result<OrthotropicDiscrepancy> {
    let Lame { lambda: l1, mu: m1 } = matrix;
    check_matrix("mu1", m1)?;
    check_matrix("lambda1 + mu1", l1 + m1)?;
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "Lambda",
            value: ratio,
            reason: "semi-axis ratio must lie in (0, 1]; use the crack limit for 0 and swap axes above 1",
        });
    }
    let r = ratio;
    let p = l1 + 2.0 * m1;
    let lambda = -p * (l1 * p * (1.0 + r * r) - 2.0 * r * m1 * m1) / (2.0 * r * m1 * (l1 + m1));
    let mu = -(1.0 + r) * p * (l1 * (1.0 - r) + 2.0 * m1) / (2.0 * r * (l1 + m1));
    let xi = (1.0 - r * r) * p / (2.0 * r);
    let omega = (1.0 - r * r) * p / r;
    Ok(OrthotropicDiscrepancy {
        lambda,
        mu,
        xi,
        omega,
        axes: OrthogonalTransform::identity(Dim::Two),
    })
}

/// Finite limit of the nonlocal parameters for aligned cracks of length
/// `2 b1` in a square RVE. The discrepancy itself diverges like `1/Lambda`
/// while `f` vanishes like `Lambda`, so only the products are returned. The
/// square side cancels out.
pub fn crack_products(matrix: Lame, b1: f64) -> Result<NonlocalParams> {
    let Lame { lambda: l1, mu: m1 } = matrix;
    check_matrix("mu1", m1)?;
    check_matrix("lambda1 + mu1", l1 + m1)?;
    check_matrix("b1", b1)?;
    let c = core::f64::consts::PI * b1 * b1 / 48.0;
    let p = l1 + 2.0 * m1;
    let a2 = c * l1 * p * p / (m1 * (l1 + m1));
    let a4 = c * p * p / (l1 + m1);
    let a6 = -c * p;
    let a9 = -2.0 * c * p;
    Ok(NonlocalParams {
        axes: OrthogonalTransform::identity(Dim::Two),
        a2: vec![a2; 2],
        a4: vec![a4; 2],
        a5: vec![a4; 2],
        a6: Some(a6),
        a9: Some(a9),
    })
}

/// Negative-definiteness verdict for a discrepancy tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeDefiniteness {
    pub negative_definite: bool,
    /// `K~` for isotropic models.
    pub bulk: Option<f64>,
    /// `mu~` for isotropic models.
    pub shear: Option<f64>,
    /// Extremes of the condensed (Mandel) matrix.
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Isotropic models use `K~ < 0 and mu~ < 0`; others use the eigenvalues of
/// the condensed matrix with the relative threshold of [`is_positive_definite`].
pub fn is_negative_definite(d: &Discrepancy) -> NegativeDefiniteness {
    let neg = is_positive_definite(&d.to_full_tensor().scaled(-1.0));
    let (min_eigenvalue, max_eigenvalue) = (-neg.max_eigenvalue, -neg.min_eigenvalue);
    match d {
        Discrepancy::Isotropic(iso) => NegativeDefiniteness {
            negative_definite: iso.bulk() < 0.0 && iso.mu < 0.0,
            bulk: Some(iso.bulk()),
            shear: Some(iso.mu),
            min_eigenvalue,
            max_eigenvalue,
        },
        _ => NegativeDefiniteness {
            negative_definite: neg.positive_definite,
            bulk: None,
            shear: None,
            min_eigenvalue,
            max_eigenvalue,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{classify_symmetry, ProbeSet, SymmetryClass};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-13 * b.abs().max(1.0)
    }

    #[test]
    fn circular_void() {
        let d = circular_inclusion(1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(close(d.lambda, 0.0) && close(d.mu, -2.0));
        assert!(close(d.bulk(), -2.0));
    }

    #[test]
    fn identical_phases_give_zero() {
        let d = circular_inclusion(2.0, 1.0, 2.0, 1.0).unwrap();
        assert_eq!((d.lambda, d.mu), (0.0, 0.0));
        for erratum in [false, true] {
            let s = spherical_inclusion(2.0, 1.0, 2.0, 1.0, erratum).unwrap();
            assert_eq!((s.discrepancy.lambda, s.discrepancy.mu), (0.0, 0.0));
            assert!(s.warnings.is_empty());
        }
    }

    #[test]
    fn circular_soft_inclusion() {
        // Bulk term (1)(3)/(2) = 1.5, shear term 1.5/4 = 0.375.
        let d = circular_inclusion(2.0, 1.0, 1.0, 0.5).unwrap();
        assert!(close(d.lambda, -1.125));
        assert!(close(d.mu, -0.375));
    }

    #[test]
    fn circular_zero_denominator() {
        assert!(matches!(
            circular_inclusion(1.0, 1.0, -1.0, 0.0),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(circular_inclusion(0.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn spherical_literal_void_warns() {
        let s = spherical_inclusion(2.0, 1.0, 0.0, 0.0, false).unwrap();
        assert!(close(s.discrepancy.mu, 50.0 / 26.0));
        assert_eq!(s.warnings[0].code, WarningCode::SphericalSignConflict);
        let nd = is_negative_definite(&s.discrepancy.into());
        assert!(!nd.negative_definite);

        let e = spherical_inclusion(2.0, 1.0, 0.0, 0.0, true).unwrap();
        assert!(close(e.discrepancy.mu, -50.0 / 26.0));
        assert!(close(e.discrepancy.bulk(), s.discrepancy.bulk()));
        assert!(e.warnings.is_empty());
    }

    #[test]
    fn spherical_bracket() {
        let s = spherical_inclusion(2.0, 1.0, 1.0, 0.5, false).unwrap();
        assert!(close(-s.discrepancy.lambda, -10.0 / 7.0 + 50.0 / 114.0));
    }

    #[test]
    fn elliptic_hole_values() {
        let d = elliptic_hole(Lame::new(0.0, 1.0), 1.0).unwrap();
        assert_eq!((d.lambda, d.mu, d.xi, d.omega), (2.0, -4.0, 0.0, 0.0));
        let d = elliptic_hole(Lame::new(0.0, 1.0), 0.5).unwrap();
        assert!(close(d.lambda, 2.0) && close(d.mu, -6.0) && close(d.xi, 1.5) && close(d.omega, 3.0));
        let c = d.to_tensor();
        assert!(close(c.get([0, 0, 0, 0]), -7.0));
        assert!(close(c.get([0, 1, 0, 1]), -4.5));
        assert!(elliptic_hole(Lame::new(0.0, 1.0), 0.0).is_err());
        assert!(elliptic_hole(Lame::new(0.0, 1.0), 1.5).is_err());
    }

    #[test]
    fn isotropic_hole_classifies_isotropic() {
        let d = elliptic_hole(Lame::new(0.0, 1.0), 1.0).unwrap();
        let probes = ProbeSet::canonical(Dim::Two);
        assert_eq!(classify_symmetry(&d.to_tensor(), &probes).unwrap().class, SymmetryClass::Isotropic);
    }

    #[test]
    fn isotropic_kernel_components() {
        let c = IsotropicDiscrepancy::new(0.0, -1.0, Dim::Two).to_tensor();
        assert_eq!(c.get([0, 1, 0, 1]), -1.0);
        assert_eq!(c.get([0, 0, 0, 0]), -2.0);
    }

    #[test]
    fn crack_values() {
        let pi = core::f64::consts::PI;
        let p = crack_products(Lame::new(1.0, 1.0), 1.0).unwrap();
        assert!(close(p.a2[0], 3.0 * pi / 32.0) && close(p.a4[0], 3.0 * pi / 32.0));
        assert!(close(p.a6.unwrap(), -pi / 16.0) && close(p.a9.unwrap(), -pi / 8.0));
        let p = crack_products(Lame::new(0.0, 1.0), 1.0).unwrap();
        assert_eq!(p.a2[0], 0.0);
        assert!(close(p.a4[0], pi / 12.0) && close(p.a6.unwrap(), -pi / 24.0) && close(p.a9.unwrap(), -pi / 12.0));
    }

    #[test]
    fn negative_definiteness() {
        let nd = is_negative_definite(&IsotropicDiscrepancy::new(0.0, -2.0, Dim::Two).into());
        assert!(nd.negative_definite && nd.bulk == Some(-2.0));
        let nd = is_negative_definite(&IsotropicDiscrepancy::new(2.0, -4.0, Dim::Two).into());
        assert!(nd.negative_definite && nd.bulk == Some(-2.0));
        let nd = is_negative_definite(&IsotropicDiscrepancy::new(0.0, 0.0, Dim::Two).into());
        assert!(!nd.negative_definite);
        let nd = is_negative_definite(&Discrepancy::Full(ElasticTensor::zeros(Dim::Three)));
        assert!(!nd.negative_definite);
        let hole = elliptic_hole(Lame::new(0.0, 1.0), 0.5).unwrap();
        assert!(is_negative_definite(&hole.into()).negative_definite);
    }

    #[test]
    fn effective_roundtrip() {
        let c1 = ElasticTensor::isotropic(Lame::new(1.0, 1.0), Dim::Three);
        let x = IsotropicDiscrepancy::new(0.3, -0.7, Dim::Three).to_tensor();
        let f = 0.01;
        let c_eq = c1.add(&x.scaled(f)).unwrap();
        let back = from_effective(&c_eq, &c1, f).unwrap();
        assert!(back.max_abs_diff(&x) < 1e-12);
        let iso = IsotropicDiscrepancy::from_tensor(&back).unwrap();
        assert!((iso.lambda - 0.3).abs() < 1e-12 && (iso.mu + 0.7).abs() < 1e-12);
        assert!(from_effective(&c_eq, &c1, 0.0).is_err());
        assert_eq!(from_effective(&c1, &c1, f).unwrap().norm(), 0.0);
    }
}
