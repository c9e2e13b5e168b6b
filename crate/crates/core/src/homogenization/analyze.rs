use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use super::{effective_grad_tensor, extract_ortho_params, Extraction, NonlocalParams};
use crate::discrepancy::{
    circular_inclusion, elliptic_hole, from_effective, is_negative_definite, spherical_inclusion, Discrepancy,
    IsotropicDiscrepancy, NegativeDefiniteness,
};
use crate::geometry::{
    principal_inertia, rve_inertia_decomposition, InertiaDecomposition, Microstructure, Phase, PrincipalInertia,
    ShapeKind,
};
use crate::tensor::{
    classify_with_tolerance, is_positive_definite, Classification, CLASSIFICATION_TOLERANCE, Definiteness, Dim, ElasticTensor, GradElasticTensor,
    Lame, OrthogonalTransform, ProbeSet, Rotate, SymMatrix, SymmetryClass,
};
use crate::{Error, Result, Warning, WarningCode};

/// Relative off-diagonal size below which `B` is taken as axis-aligned.
const ALIGNED_TOLERANCE: f64 = 1e-14;

/// Where the discrepancy tensor comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// Closed form chosen from the inclusion shape and phase.
    Catalog { erratum_sign: bool },
    /// Caller-supplied discrepancy.
    Explicit(Discrepancy),
    /// `C~ = (C_eq - C1) / f` from a measured effective stiffness.
    FromEffective(ElasticTensor),
}

/// Probe classes of `A`, `C~` and `B`, all read in the extraction frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub aeq: Classification,
    pub ctilde: Classification,
    pub inertia: Classification,
    /// Class of the probe-wise intersection of the `C~` and `B` sets.
    pub intersection: SymmetryClass,
    /// `A` is invariant under exactly the probes leaving both `C~` and `B`
    /// invariant. A vanishing `A` (from `C~ = 0`) has every symmetry and is
    /// counted as consistent.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogenizationResult {
    pub fraction: f64,
    pub discrepancy: Discrepancy,
    pub ctilde: ElasticTensor,
    pub ctilde_definiteness: NegativeDefiniteness,
    pub inertia: Option<InertiaDecomposition>,
    pub b_rve: SymMatrix,
    pub principal: PrincipalInertia,
    /// Frame of the parameter extraction and the symmetry probes.
    pub frame: OrthogonalTransform,
    pub aeq: GradElasticTensor,
    pub extraction: Extraction,
    pub definiteness: Definiteness,
    pub symmetry: SymmetryReport,
    pub warnings: Vec<Warning>,
}

impl HomogenizationResult {
    pub fn dim(&self) -> Dim {
        self.aeq.dim()
    }

    pub fn params(&self) -> &NonlocalParams {
        &self.extraction.params
    }
}

/// Axis-aligned `B` keeps the coordinate frame; otherwise its principal axes.
/// A spherical `B` defers to the discrepancy axes when there are any.
fn extraction_frame(b: &SymMatrix, principal: &PrincipalInertia, d: &Discrepancy) -> OrthogonalTransform {
    let dim = b.dim();
    if principal.spherical {
        return d.axes().cloned().unwrap_or_else(|| OrthogonalTransform::identity(dim));
    }
    let n = dim.n();
    let scale = (0..n).map(|i| b.entry(i, i).abs()).fold(0.0, f64::max);
    let off = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max(b.entry(i, j).abs()));
    if off <= ALIGNED_TOLERANCE * scale {
        OrthogonalTransform::identity(dim)
    } else {
        principal.axes.clone()
    }
}

/// Probe classes of `A`, `C~` and `B` read in `frame`, with a relative
/// invariance tolerance.
pub fn symmetry_report(
    aeq: &GradElasticTensor,
    ctilde: &ElasticTensor,
    b: &SymMatrix,
    frame: &OrthogonalTransform,
    tolerance: f64,
) -> Result<SymmetryReport> {
    let probes = ProbeSet::canonical(b.dim());
    let back = frame.transpose();
    let aeq_class = classify_with_tolerance(&aeq.rotate(&back)?, &probes, tolerance)?;
    let ctilde_class = classify_with_tolerance(&ctilde.rotate(&back)?, &probes, tolerance)?;
    let inertia_class = classify_with_tolerance(&b.rotate(&back)?, &probes, tolerance)?;
    Ok(SymmetryReport {
        intersection: ctilde_class.intersection(&inertia_class, &probes),
        consistent: aeq.norm() == 0.0 || aeq_class.is_intersection_of(&ctilde_class, &inertia_class),
        aeq: aeq_class,
        ctilde: ctilde_class,
        inertia: inertia_class,
    })
}

/// Generic pipeline from a discrepancy, an RVE inertia and a fraction.
pub fn homogenize(discrepancy: Discrepancy, b_rve: SymMatrix, f: f64, mut warnings: Vec<Warning>) -> Result<HomogenizationResult> {
    let ctilde = discrepancy.to_full_tensor();
    let aeq = effective_grad_tensor(&ctilde, &b_rve, f)?;
    let principal = principal_inertia(&b_rve)?;
    let frame = extraction_frame(&b_rve, &principal, &discrepancy);
    let extraction = extract_ortho_params(&aeq, &frame)?;
    if !extraction.structural {
        warnings.push(Warning::new(
            WarningCode::ExtractionResidual,
            format!(
                "A_eq leaves the orthotropic parameter span (relative residual {:e}); parameters are a least-squares fit",
                extraction.residual
            ),
        ));
    }

    let symmetry = symmetry_report(&aeq, &ctilde, &b_rve, &frame, CLASSIFICATION_TOLERANCE)?;

    Ok(HomogenizationResult {
        fraction: f,
        ctilde_definiteness: is_negative_definite(&discrepancy),
        definiteness: is_positive_definite(&aeq),
        discrepancy,
        ctilde,
        inertia: None,
        b_rve,
        principal,
        frame,
        aeq,
        extraction,
        symmetry,
        warnings,
    })
}

fn phase_moduli(phase: Phase) -> Lame {
    match phase {
        Phase::Elastic(l) => l,
        Phase::Void => Lame::new(0.0, 0.0),
    }
}

fn catalog_discrepancy(m: &Microstructure, erratum_sign: bool, warnings: &mut Vec<Warning>) -> Result<Discrepancy> {
    let dim = m.dim();
    let matrix = m.matrix();
    let inclusion = phase_moduli(m.phase());
    match (m.inclusion().kind(), dim) {
        (ShapeKind::Circle { .. }, Dim::Two) => Ok(circular_inclusion(
            matrix.bulk(dim),
            matrix.mu,
            inclusion.bulk(dim),
            inclusion.mu,
        )?
        .into()),
        (ShapeKind::Sphere { .. }, Dim::Three) => {
            let s = spherical_inclusion(matrix.bulk(dim), matrix.mu, inclusion.bulk(dim), inclusion.mu, erratum_sign)?;
            warnings.extend(s.warnings);
            Ok(s.discrepancy.into())
        }
        (ShapeKind::Ellipse { b1, b2 }, Dim::Two) => {
            if m.phase() != Phase::Void {
                return Err(Error::ModelUnavailable(
                    "elliptic inclusions have a closed form only as holes; supply ctilde explicitly",
                ));
            }
            let own = m
                .inclusion()
                .orientation()
                .cloned()
                .unwrap_or_else(|| OrthogonalTransform::identity(Dim::Two));
            let (ratio, axes) = if b2 <= b1 {
                (b2 / b1, own)
            } else {
                (b1 / b2, own.compose(&OrthogonalTransform::rotation_2d(FRAC_PI_2)))
            };
            Ok(elliptic_hole(matrix, ratio)?.with_axes(axes)?.into())
        }
        _ => Err(Error::ModelUnavailable(
            "closed forms exist for circles (2D), spheres (3D) and elliptic holes (2D)",
        )),
    }
}

/// End-to-end: geometry, discrepancy, `A_eq`, extraction, classification.
pub fn analyze(m: &Microstructure, model: &Model) -> Result<HomogenizationResult> {
    let mut warnings: Vec<Warning> = m.warnings().to_vec();
    let inertia = rve_inertia_decomposition(m)?;
    let f = m.fraction();
    let discrepancy = match model {
        Model::Catalog { erratum_sign } => catalog_discrepancy(m, *erratum_sign, &mut warnings)?,
        Model::Explicit(d) => {
            if d.dim() != m.dim() {
                return Err(Error::DimensionMismatch {
                    expected: m.dim().n(),
                    found: d.dim().n(),
                });
            }
            d.clone()
        }
        Model::FromEffective(c_eq) => {
            let c1 = ElasticTensor::isotropic(m.matrix(), m.dim());
            let c = from_effective(c_eq, &c1, f)?;
            match IsotropicDiscrepancy::from_tensor(&c) {
                Ok(iso) => iso.into(),
                Err(_) => Discrepancy::Full(c),
            }
        }
    };
    let mut result = homogenize(discrepancy, inertia.rve.clone(), f, warnings)?;
    result.inertia = Some(inertia);
    Ok(result)
}
