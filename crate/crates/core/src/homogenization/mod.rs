//! The equivalent second-gradient tensor and its orthotropic parameters.
//!
//! `A_ijhlmn = -(f/4)(C~_ihln B_jm + C~_ihmn B_jl + C~_jhln B_im + C~_jhmn B_il)`
//! is the Mindlin-symmetric part of `D_ijhlmn = -f C~_ihln B_jm`. It makes
//! the energy mismatch `f B_lm C~_ijhk b_ijl b_hkm + A_jlikmh b_ijl b_hkm`
//! vanish for every quadratic coefficient array `b`.

mod analyze;
mod closed_form;
mod params;
mod sweep;

pub use analyze::{analyze, homogenize, symmetry_report, HomogenizationResult, Model, SymmetryReport};
pub use closed_form::{closed_form_case, literal_params, ClosedFormCase, ClosedFormResult, CRACK_LIMIT_RATIO};
pub use params::{
    anisotropy_ratios, assemble_from_params, extract_ortho_params, AnisotropyRatios, Extraction, NonlocalParams,
    STRUCTURE_TOLERANCE,
};
pub use sweep::{ellipse_sweep, figure_grid, SweepRow, FIGURE_POISSON_RATIOS};

use crate::tensor::{kron, Dense, ElasticTensor, GradElasticTensor, QuadraticCoefficients, SymMatrix};
use crate::{Error, Result};

const PSD_TOLERANCE: f64 = 1e-13;

fn check_inputs(c: &ElasticTensor, b: &SymMatrix, f: f64) -> Result<()> {
    if c.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim().n(),
            found: b.dim().n(),
        });
    }
    check_fraction(f)?;
    let eig = b.eigen();
    if eig.min() < -PSD_TOLERANCE * eig.max_abs() {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(())
}

fn check_fraction(f: f64) -> Result<()> {
    if f.is_finite() && f >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "f",
            value: f,
            reason: "volume fraction must be non-negative",
        })
    }
}

/// First-order equivalent second-gradient tensor.
pub fn effective_grad_tensor(c: &ElasticTensor, b: &SymMatrix, f: f64) -> Result<GradElasticTensor> {
    check_inputs(c, b, f)?;
    let q = -f / 4.0;
    let t = Dense::<6>::from_fn(c.dim(), |[i, j, h, l, m, n]| {
        q * (c.get([i, h, l, n]) * b.entry(j, m)
            + c.get([i, h, m, n]) * b.entry(j, l)
            + c.get([j, h, l, n]) * b.entry(i, m)
            + c.get([j, h, m, n]) * b.entry(i, l))
    });
    GradElasticTensor::from_dense(t)
}

/// `D_ijhlmn = -f C~_ihln B_jm`, whose symmetrization is
/// [`effective_grad_tensor`].
pub fn raw_grad_tensor(c: &ElasticTensor, b: &SymMatrix, f: f64) -> Result<Dense<6>> {
    check_inputs(c, b, f)?;
    Ok(Dense::from_fn(c.dim(), |[i, j, h, l, m, n]| {
        -f * c.get([i, h, l, n]) * b.entry(j, m)
    }))
}

/// The same tensor for a spherical inertia `rho^2 I`, written with Kronecker
/// deltas in place of `B`.
pub fn spherical_case(c: &ElasticTensor, rho: f64, f: f64) -> Result<GradElasticTensor> {
    check_fraction(f)?;
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "radius of gyration must be non-negative",
        });
    }
    let q = -f * rho * rho / 4.0;
    let t = Dense::<6>::from_fn(c.dim(), |[i, j, h, l, m, n]| {
        q * (c.get([i, h, l, n]) * kron(j, m)
            + c.get([i, h, m, n]) * kron(j, l)
            + c.get([j, h, l, n]) * kron(i, m)
            + c.get([j, h, m, n]) * kron(i, l))
    });
    GradElasticTensor::from_dense(t)
}

/// `r(b) = f B_lm C~_ijhk b_ijl b_hkm + A_jlikmh b_ijl b_hkm`.
pub fn annihilation_residual(
    c: &ElasticTensor,
    b: &SymMatrix,
    f: f64,
    a: &GradElasticTensor,
    beta: &QuadraticCoefficients,
) -> Result<f64> {
    check_inputs(c, b, f)?;
    for d in [a.dim(), beta.dim()] {
        if d != c.dim() {
            return Err(Error::DimensionMismatch {
                expected: c.dim().n(),
                found: d.n(),
            });
        }
    }
    let n = c.dim().n();
    let mut local = 0.0;
    for i in 0..n {
        for j in 0..n {
            for h in 0..n {
                for k in 0..n {
                    let cc = c.get([i, j, h, k]);
                    if cc == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        for m in 0..n {
                            local += cc * b.entry(l, m) * beta.get([i, j, l]) * beta.get([h, k, m]);
                        }
                    }
                }
            }
        }
    }
    Ok(f * local + crate::tensor::grad_quadratic_form(a, beta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrepancy::IsotropicDiscrepancy;
    use crate::tensor::{symmetrize, Dim, OrthogonalTransform};

    #[test]
    fn zero_inputs_give_zero() {
        let c = IsotropicDiscrepancy::new(1.0, -2.0, Dim::Two).to_tensor();
        let b = SymMatrix::diagonal(&[1.0 / 3.0, 1.0 / 12.0]).unwrap();
        assert_eq!(effective_grad_tensor(&c, &b, 0.0).unwrap().norm(), 0.0);
        assert_eq!(
            effective_grad_tensor(&ElasticTensor::zeros(Dim::Two), &b, 0.01).unwrap().norm(),
            0.0
        );
    }

    #[test]
    fn isotropic_rectangle_parameters() {
        let c = IsotropicDiscrepancy::new(0.0, -1.0, Dim::Two).to_tensor();
        let b = SymMatrix::diagonal(&[1.0 / 3.0, 1.0 / 12.0]).unwrap();
        let a = effective_grad_tensor(&c, &b, 0.01).unwrap();
        let e = extract_ortho_params(&a, &OrthogonalTransform::identity(Dim::Two)).unwrap();
        assert!(e.residual < 1e-14);
        let p = e.params;
        assert!((p.a4[0] - 1.0 / 600.0).abs() < 1e-16 && (p.a5[0] - 1.0 / 600.0).abs() < 1e-16);
        assert!((p.a4[1] - 1.0 / 2400.0).abs() < 1e-16 && (p.a5[1] - 1.0 / 2400.0).abs() < 1e-16);
        assert!(p.a2.iter().all(|v| v.abs() < 1e-17));
    }

    #[test]
    fn symmetrized_raw_tensor_matches() {
        let c = IsotropicDiscrepancy::new(0.4, -1.3, Dim::Three).to_tensor();
        let b = SymMatrix::new(Dim::Three, &[0.3, 0.01, 0.0, 0.01, 0.2, 0.02, 0.0, 0.02, 0.1]).unwrap();
        let a = effective_grad_tensor(&c, &b, 0.02).unwrap();
        let s = symmetrize(&raw_grad_tensor(&c, &b, 0.02).unwrap()).unwrap();
        assert!(a.max_abs_diff(&s) <= 1e-15 * a.dense().max_abs());
    }

    #[test]
    fn spherical_reduction() {
        let c = IsotropicDiscrepancy::new(0.4, -1.3, Dim::Two).to_tensor();
        let a = effective_grad_tensor(&c, &SymMatrix::scalar(Dim::Two, 1.0 / 12.0), 0.01).unwrap();
        let s = spherical_case(&c, (1.0f64 / 12.0).sqrt(), 0.01).unwrap();
        assert!(a.max_abs_diff(&s) <= 1e-15 * a.dense().max_abs());
        assert_eq!(spherical_case(&c, 0.0, 0.01).unwrap().norm(), 0.0);
    }

    #[test]
    fn rejects_indefinite_inertia() {
        let c = ElasticTensor::zeros(Dim::Two);
        let b = SymMatrix::diagonal(&[1.0, -1.0]).unwrap();
        assert!(effective_grad_tensor(&c, &b, 0.1).is_err());
        assert!(effective_grad_tensor(&c, &SymMatrix::scalar(Dim::Two, 1.0), -0.1).is_err());
    }
}
