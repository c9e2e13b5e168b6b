//! Elliptic-hole parameters over a grid of semi-axis ratios and matrix
//! Poisson ratios, square RVE, made dimensionless by `b1^2 mu1`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::discrepancy::elliptic_hole;
use crate::tensor::Lame;
use crate::{Error, Result};

pub const FIGURE_POISSON_RATIOS: [f64; 4] = [-0.5, 0.0, 0.25, 0.4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lambda_ratio: f64,
    pub nu1: f64,
    pub a2_norm: f64,
    pub a4_norm: f64,
    pub a5_norm: f64,
    pub a6_norm: f64,
    pub a9_norm: f64,
}

/// `Lambda = 0.01, 0.02, .., 1.0` and the four matrix Poisson ratios.
pub fn figure_grid() -> (Vec<f64>, Vec<f64>) {
    ((1..=100).map(|k| k as f64 / 100.0).collect(), FIGURE_POISSON_RATIOS.to_vec())
}

/// One row per `(nu1, Lambda)`, Poisson ratio outermost, both in input order.
/// `lambda1 = 2 nu1 mu1 / (1 - 2 nu1)`; in a square RVE `f rho^2 = pi b1^2 Lambda / 12`.
pub fn ellipse_sweep(ratios: &[f64], poissons: &[f64], b1: f64, mu1: f64) -> Result<Vec<SweepRow>> {
    for (name, v) in [("b1", b1), ("mu1", mu1)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                reason: "must be positive",
            });
        }
    }
    if let Some(&nu) = poissons.iter().find(|nu| !(**nu > -1.0 && **nu < 0.5)) {
        return Err(Error::InvalidParameter {
            name: "nu1",
            value: nu,
            reason: "Poisson ratio must lie in (-1, 0.5)",
        });
    }
    let mut rows = Vec::with_capacity(ratios.len() * poissons.len());
    let scale = b1 * b1 * mu1;
    for &nu in poissons {
        let matrix = Lame::from_poisson_shear(nu, mu1);
        for &ratio in ratios {
            let d = elliptic_hole(matrix, ratio)?;
            let c = -PI * b1 * b1 * ratio / 24.0 / scale;
            rows.push(SweepRow {
                lambda_ratio: ratio,
                nu1: nu,
                a2_norm: c * d.lambda,
                a4_norm: c * d.mu,
                a5_norm: c * d.mu,
                a6_norm: c * d.xi,
                a9_norm: c * d.omega,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let (r, nu) = figure_grid();
        assert_eq!(r.len(), 100);
        assert_eq!(r[99], 1.0);
        let rows = ellipse_sweep(&r, &nu, 1.0, 1.0).unwrap();
        assert_eq!(rows.len(), 400);
        assert_eq!((rows[0].nu1, rows[0].lambda_ratio), (-0.5, 0.01));
    }

    #[test]
    fn circular_end_has_no_coupling() {
        let rows = ellipse_sweep(&[1.0], &[0.0], 1.0, 1.0).unwrap();
        assert_eq!(rows[0].a6_norm, 0.0);
        assert_eq!(rows[0].a9_norm, 0.0);
    }

    #[test]
    fn crack_end() {
        let rows = ellipse_sweep(&[1e-8], &[0.0, 0.25], 1.0, 1.0).unwrap();
        assert!(rows[0].a2_norm.abs() < 1e-7);
        assert!((rows[0].a4_norm - PI / 12.0).abs() < 1e-7);
        assert!((rows[1].a2_norm - 3.0 * PI / 32.0).abs() < 1e-7);
        assert!((rows[1].a4_norm - 3.0 * PI / 32.0).abs() < 1e-7);
    }

    #[test]
    fn bounds() {
        assert!(ellipse_sweep(&[1.5], &[0.0], 1.0, 1.0).is_err());
        assert!(ellipse_sweep(&[0.5], &[0.5], 1.0, 1.0).is_err());
        assert!(ellipse_sweep(&[0.5], &[0.0], 0.0, 1.0).is_err());
    }
}
