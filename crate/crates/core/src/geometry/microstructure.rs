use alloc::format;
use alloc::vec::Vec;

use super::monte_carlo::escape_fraction;
use super::{normalized_inertia, Shape};
use crate::math::relative;
use crate::tensor::{Dim, Lame, SymMatrix};
use crate::{Error, Result, Warning, WarningCode};

pub const DEFAULT_DILUTE_THRESHOLD: f64 = 0.1;

const FRACTION_TOLERANCE: f64 = 1e-9;
const CONTAINMENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    Elastic(Lame),
    Void,
}

/// One centred inclusion inside an RVE, both phases isotropic.
#[derive(Debug, Clone, PartialEq)]
pub struct Microstructure {
    rve: Shape,
    inclusion: Shape,
    matrix: Lame,
    phase: Phase,
    fraction: f64,
    warnings: Vec<Warning>,
}

impl Microstructure {
    /// `fraction`, when given, must agree with the measure ratio to 1e-9.
    pub fn new(
        rve: Shape,
        inclusion: Shape,
        matrix: Lame,
        phase: Phase,
        fraction: Option<f64>,
        dilute_threshold: f64,
    ) -> Result<Self> {
        if rve.dim() != inclusion.dim() {
            return Err(Error::DimensionMismatch {
                expected: rve.dim().n(),
                found: inclusion.dim().n(),
            });
        }
        let derived = inclusion.measure() / rve.measure();
        if let Some(given) = fraction {
            if !given.is_finite() || relative((given - derived).abs(), derived) > FRACTION_TOLERANCE {
                return Err(Error::InconsistentVolumeFraction { given, derived });
            }
        }
        if derived > 1.0 {
            return Err(Error::InvalidParameter {
                name: "volume fraction",
                value: derived,
                reason: "inclusion is larger than the RVE",
            });
        }
        let mut warnings = Vec::new();
        if derived > dilute_threshold {
            warnings.push(Warning::new(
                WarningCode::NotDilute,
                format!("volume fraction {derived} exceeds the dilute threshold {dilute_threshold}"),
            ));
        }
        Ok(Microstructure {
            rve,
            inclusion,
            matrix,
            phase,
            fraction: derived,
            warnings,
        })
    }

    pub fn dim(&self) -> Dim {
        self.rve.dim()
    }

    pub fn rve(&self) -> &Shape {
        &self.rve
    }

    pub fn inclusion(&self) -> &Shape {
        &self.inclusion
    }

    pub fn matrix(&self) -> Lame {
        self.matrix
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Inclusion measure over RVE measure.
    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    /// Sampled check that the inclusion lies within the RVE outer contour.
    /// Returns the fraction of inclusion samples found outside.
    pub fn containment_escape(&self, samples: usize, seed: u64) -> f64 {
        escape_fraction(&self.inclusion, &self.rve, samples, seed)
    }
}

/// Normalized inertia of the matrix phase, the inclusion and the whole RVE.
#[derive(Debug, Clone, PartialEq)]
pub struct InertiaDecomposition {
    pub matrix: SymMatrix,
    pub inclusion: SymMatrix,
    pub rve: SymMatrix,
}

impl InertiaDecomposition {
    pub fn sum_rule_residual(&self) -> f64 {
        self.matrix
            .add(&self.inclusion)
            .expect("same dimension")
            .max_abs_diff(&self.rve)
    }
}

/// `B_rve` from the outer contour, `B2` from the inclusion, `B1 = B_rve - B2`.
pub fn rve_inertia_decomposition(m: &Microstructure) -> Result<InertiaDecomposition> {
    let omega = m.rve.measure();
    let rve = normalized_inertia(&m.rve, omega)?;
    let inclusion = normalized_inertia(&m.inclusion, omega)?;
    let matrix = rve.sub(&inclusion)?;
    let eig = matrix.eigen();
    if eig.min() < -CONTAINMENT_TOLERANCE * eig.max_abs().max(rve.eigen().max_abs()) {
        return Err(Error::NotContained {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(InertiaDecomposition { matrix, inclusion, rve })
}
