//! Probe-based material symmetry classes.
//!
//! A tensor `T` is invariant under `Q` when `|Q(T) - T| <= tol |T|`. The
//! canonical probe set holds the reflections about each coordinate axis, the
//! quarter turns about each axis (one in 2D), and eight fixed pseudo-random
//! rotations. The label is read off which probe families leave `T` invariant.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Dim, OrthogonalTransform, Rotate};
use crate::Result;

/// Relative invariance tolerance used for labels.
pub const CLASSIFICATION_TOLERANCE: f64 = 1e-9;

const GENERIC_PROBES: usize = 8;
const PROBE_SEED: u64 = 0x5EED0FA115;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    Reflection,
    QuarterTurn,
    Generic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub kind: ProbeKind,
    pub transform: OrthogonalTransform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    dim: Dim,
    probes: Vec<Probe>,
}

impl ProbeSet {
    pub fn canonical(dim: Dim) -> Self {
        let mut probes = Vec::new();
        for axis in 0..dim.n() {
            probes.push(Probe {
                kind: ProbeKind::Reflection,
                transform: OrthogonalTransform::reflection(dim, axis),
            });
        }
        match dim {
            Dim::Two => probes.push(Probe {
                kind: ProbeKind::QuarterTurn,
                transform: OrthogonalTransform::rotation_2d(FRAC_PI_2),
            }),
            Dim::Three => {
                for axis in 0..3 {
                    probes.push(Probe {
                        kind: ProbeKind::QuarterTurn,
                        transform: OrthogonalTransform::axis_rotation_3d(axis, FRAC_PI_2),
                    });
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        for _ in 0..GENERIC_PROBES {
            probes.push(Probe {
                kind: ProbeKind::Generic,
                transform: OrthogonalTransform::random(dim, &mut rng),
            });
        }
        ProbeSet { dim, probes }
    }

    /// Appends an extra probe, e.g. a rotation the caller cares about.
    pub fn with_probe(mut self, probe: Probe) -> Self {
        self.probes.push(probe);
        self
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn probes(&self) -> &[Probe] {
        &self.probes
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryClass {
    Isotropic,
    /// Invariant under the axis reflections and quarter turns (the square
    /// group in 2D, the cubic group in 3D) but not under generic rotations.
    Cubic,
    Orthotropic,
    Generic,
}

impl SymmetryClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryClass::Isotropic => "isotropic",
            SymmetryClass::Cubic => "cubic",
            SymmetryClass::Orthotropic => "orthotropic",
            SymmetryClass::Generic => "generic",
        }
    }

    fn from_invariance(probes: &ProbeSet, invariant: &[bool]) -> Self {
        let all = |kind: ProbeKind| {
            probes
                .probes()
                .iter()
                .zip(invariant)
                .filter(|(p, _)| p.kind == kind)
                .all(|(_, &ok)| ok)
        };
        if invariant.iter().all(|&ok| ok) {
            SymmetryClass::Isotropic
        } else if all(ProbeKind::Reflection) && all(ProbeKind::QuarterTurn) {
            SymmetryClass::Cubic
        } else if all(ProbeKind::Reflection) {
            SymmetryClass::Orthotropic
        } else {
            SymmetryClass::Generic
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: SymmetryClass,
    /// Invariance verdict per probe, in probe-set order.
    pub invariant: Vec<bool>,
    /// Relative deviation `|Q(T) - T| / |T|` per probe.
    pub deviations: Vec<f64>,
}

impl Classification {
    /// Label of the probe-wise intersection of two invariance sets.
    pub fn intersection(&self, other: &Classification, probes: &ProbeSet) -> SymmetryClass {
        let both: Vec<bool> = self.invariant.iter().zip(&other.invariant).map(|(a, b)| *a && *b).collect();
        SymmetryClass::from_invariance(probes, &both)
    }

    /// Whether the invariance set equals the intersection of the other two.
    pub fn is_intersection_of(&self, a: &Classification, b: &Classification) -> bool {
        self.invariant
            .iter()
            .zip(a.invariant.iter().zip(&b.invariant))
            .all(|(s, (x, y))| *s == (*x && *y))
    }
}

/// Classifies `t` with the canonical relative tolerance.
pub fn classify_symmetry<T: Rotate>(t: &T, probes: &ProbeSet) -> Result<Classification> {
    classify_with_tolerance(t, probes, CLASSIFICATION_TOLERANCE)
}

pub fn classify_with_tolerance<T: Rotate>(t: &T, probes: &ProbeSet, tolerance: f64) -> Result<Classification> {
    let scale = t.magnitude();
    let mut invariant = Vec::with_capacity(probes.len());
    let mut deviations = Vec::with_capacity(probes.len());
    for probe in probes.probes() {
        let dev = t.rotate(&probe.transform)?.distance_to(t);
        invariant.push(dev <= tolerance * scale);
        deviations.push(crate::math::relative(dev, scale));
    }
    Ok(Classification {
        class: SymmetryClass::from_invariance(probes, &invariant),
        invariant,
        deviations,
    })
}
