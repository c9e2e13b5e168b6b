use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("unsupported dimension {0}, expected 2 or 3")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expected {expected} components, found {found}")]
    ComponentCount { expected: usize, found: usize },

    #[error("{what} violates its index symmetries (relative deviation {deviation:e})")]
    SymmetryViolation { what: &'static str, deviation: f64 },

    #[error("matrix is not orthogonal (|Q^T Q - I| = {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    #[error("degenerate shape: {0}")]
    DegenerateShape(&'static str),

    #[error("shape centroid is off the origin (|S| = {static_moment:e}); inclusions must share the RVE centroid")]
    OffCentre { static_moment: f64 },

    #[error("matrix inertia B1 = B_rve - B2 has eigenvalue {min_eigenvalue:e} < 0: inclusion not contained in the RVE")]
    NotContained { min_eigenvalue: f64 },

    #[error("inertia tensor is not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("volume fraction f = {given} is inconsistent with the geometry, which gives f = {derived}")]
    InconsistentVolumeFraction { given: f64, derived: f64 },

    #[error("no discrepancy model for this microstructure: {0}")]
    ModelUnavailable(&'static str),

    #[error("parameter set has no nonzero reference axis value")]
    AllZeroParameters,
}

/// Machine-readable warning categories carried into reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarningCode {
    /// Volume fraction above the dilute threshold.
    NotDilute,
    /// The literal 3D spherical-inclusion form gives a discrepancy tensor that
    /// is not negative definite although the inclusion is softer.
    SphericalSignConflict,
    /// The nonlocal tensor left the span of the orthotropic basis.
    ExtractionResidual,
}

impl WarningCode {
    pub fn as_str(self) -> &'static str {
        match self {
            WarningCode::NotDilute => "not_dilute",
            WarningCode::SphericalSignConflict => "spherical_sign_conflict",
            WarningCode::ExtractionResidual => "extraction_residual",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    pub code: WarningCode,
    pub message: String,
}

impl Warning {
    pub fn new(code: WarningCode, message: impl Into<String>) -> Self {
        Warning {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code.as_str(), self.message)
    }
}
