//! Report documents. Field order is fixed by declaration order, floats use
//! the shortest round-trip representation, so a rerun is byte-identical.

use gradhom_core::discrepancy::Discrepancy;
use gradhom_core::geometry::PrincipalInertia;
use gradhom_core::homogenization::NonlocalParams;
use gradhom_core::selfcheck::SelfCheckReport;
use gradhom_core::tensor::{condensed_elastic_matrix, condensed_grad_matrix, grad_coordinate_labels, Classification};
use gradhom_core::{OrthogonalTransform, SymMatrix, Warning};
use serde::Serialize;
use serde_json::Value;

use crate::run::JobRun;
use crate::tensor_json::rows;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: Value,
    pub inertia: InertiaSection,
    pub ctilde: CtildeSection,
    pub aeq: AeqSection,
    pub params: ParamsSection,
    pub definiteness: DefinitenessSection,
    pub symmetry: SymmetrySection,
    pub warnings: Vec<WarningEntry>,
    pub verification: VerificationSection,
}

#[derive(Debug, Clone, Serialize)]
pub struct InertiaEntry {
    pub tensor: Vec<Vec<f64>>,
    pub radii_squared: Vec<f64>,
    pub radii: Vec<f64>,
    /// Principal axes, one unit vector per entry.
    pub axes: Vec<Vec<f64>>,
    pub spherical: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InertiaSection {
    pub fraction: f64,
    pub rve: InertiaEntry,
    pub inclusion: Option<Vec<Vec<f64>>>,
    pub matrix: Option<Vec<Vec<f64>>>,
    pub sum_rule_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CtildeSection {
    pub model: &'static str,
    pub form: &'static str,
    pub erratum_sign_3d: bool,
    pub lambda_tilde: Option<f64>,
    pub mu_tilde: Option<f64>,
    pub xi_tilde: Option<f64>,
    pub omega_tilde: Option<f64>,
    #[serde(rename = "K_tilde")]
    pub k_tilde: Option<f64>,
    pub axes: Option<Vec<Vec<f64>>>,
    pub negative_definite: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Mandel matrix.
    pub condensed: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AeqSection {
    pub dimension: usize,
    pub norm: f64,
    pub basis: Vec<String>,
    pub condensed: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsSection {
    pub axes: Vec<Vec<f64>>,
    pub a2: Vec<f64>,
    pub a4: Vec<f64>,
    pub a5: Vec<f64>,
    pub a6: Option<f64>,
    pub a9: Option<f64>,
    pub residual: f64,
    pub structural: bool,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DefinitenessSection {
    pub positive_definite: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassEntry {
    pub label: &'static str,
    pub invariant: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SymmetrySection {
    pub label: &'static str,
    pub aeq: ClassEntry,
    pub ctilde: ClassEntry,
    pub inertia: ClassEntry,
    pub intersection: &'static str,
    pub consistent: bool,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WarningEntry {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiteralParams {
    pub a2: Vec<f64>,
    pub a4: Vec<f64>,
    pub a5: Vec<f64>,
    pub a6: Option<f64>,
    pub a9: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormSection {
    pub case: &'static str,
    pub literal: LiteralParams,
    pub agreement: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnihilationSection {
    pub probes: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationSection {
    pub passed: bool,
    pub annihilation: AnnihilationSection,
    pub symmetry_consistent: bool,
    pub closed_form: Option<ClosedFormSection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteSection {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckEntry>,
}

fn matrix_rows(m: &SymMatrix) -> Vec<Vec<f64>> {
    rows(m.dim().n(), |i, j| m.entry(i, j))
}

fn axes_rows(q: &OrthogonalTransform) -> Vec<Vec<f64>> {
    (0..q.dim().n()).map(|k| q.column(k)).collect()
}

fn principal_entry(b: &SymMatrix, p: &PrincipalInertia) -> InertiaEntry {
    InertiaEntry {
        tensor: matrix_rows(b),
        radii_squared: p.radii_squared.clone(),
        radii: p.radii(),
        axes: axes_rows(&p.axes),
        spherical: p.spherical,
    }
}

fn class_entry(c: &Classification) -> ClassEntry {
    ClassEntry {
        label: c.class.as_str(),
        invariant: c.invariant.clone(),
    }
}

fn literal(p: &NonlocalParams) -> LiteralParams {
    LiteralParams {
        a2: p.a2.clone(),
        a4: p.a4.clone(),
        a5: p.a5.clone(),
        a6: p.a6,
        a9: p.a9,
    }
}

pub fn inertia_section(run: &JobRun) -> InertiaSection {
    let r = &run.result;
    InertiaSection {
        fraction: r.fraction,
        rve: principal_entry(&r.b_rve, &r.principal),
        inclusion: r.inertia.as_ref().map(|d| matrix_rows(&d.inclusion)),
        matrix: r.inertia.as_ref().map(|d| matrix_rows(&d.matrix)),
        sum_rule_residual: r.inertia.as_ref().map(|d| d.sum_rule_residual()),
    }
}

pub fn ctilde_section(run: &JobRun) -> CtildeSection {
    let r = &run.result;
    let nd = &r.ctilde_definiteness;
    let (form, lambda, mu, xi, omega, bulk, axes) = match &r.discrepancy {
        Discrepancy::Isotropic(d) => ("isotropic", Some(d.lambda), Some(d.mu), None, None, Some(d.bulk()), None),
        Discrepancy::Orthotropic(d) => (
            "orthotropic",
            Some(d.lambda),
            Some(d.mu),
            Some(d.xi),
            Some(d.omega),
            Some(d.bulk()),
            Some(axes_rows(&d.axes)),
        ),
        Discrepancy::Full(_) => ("full", None, None, None, None, None, None),
    };
    let cm = condensed_elastic_matrix(&r.ctilde);
    CtildeSection {
        model: run.model.as_str(),
        form,
        erratum_sign_3d: run.erratum_sign_3d,
        lambda_tilde: lambda,
        mu_tilde: mu,
        xi_tilde: xi,
        omega_tilde: omega,
        k_tilde: bulk,
        axes,
        negative_definite: nd.negative_definite,
        min_eigenvalue: nd.min_eigenvalue,
        max_eigenvalue: nd.max_eigenvalue,
        condensed: rows(cm.size(), |i, j| cm.get(i, j)),
    }
}

pub fn aeq_section(run: &JobRun) -> AeqSection {
    let a = &run.result.aeq;
    let m = condensed_grad_matrix(a);
    AeqSection {
        dimension: a.dim().n(),
        norm: a.norm(),
        basis: grad_coordinate_labels(a.dim()),
        condensed: rows(m.size(), |i, j| m.get(i, j)),
    }
}

pub fn params_section(run: &JobRun) -> ParamsSection {
    let e = &run.result.extraction;
    let p = &e.params;
    ParamsSection {
        axes: axes_rows(&p.axes),
        a2: p.a2.clone(),
        a4: p.a4.clone(),
        a5: p.a5.clone(),
        a6: p.a6,
        a9: p.a9,
        residual: e.residual,
        structural: run.structural,
        tolerance: run.tolerances.structure,
    }
}

pub fn definiteness_section(run: &JobRun) -> DefinitenessSection {
    let d = &run.definiteness;
    DefinitenessSection {
        positive_definite: d.positive_definite,
        min_eigenvalue: d.min_eigenvalue,
        max_eigenvalue: d.max_eigenvalue,
        tolerance: d.tolerance,
    }
}

pub fn symmetry_section(run: &JobRun) -> SymmetrySection {
    let s = &run.symmetry;
    SymmetrySection {
        label: s.aeq.class.as_str(),
        aeq: class_entry(&s.aeq),
        ctilde: class_entry(&s.ctilde),
        inertia: class_entry(&s.inertia),
        intersection: s.intersection.as_str(),
        consistent: s.consistent,
        tolerance: run.tolerances.classification,
    }
}

pub fn warning_entries(ws: &[Warning]) -> Vec<WarningEntry> {
    ws.iter()
        .map(|w| WarningEntry {
            code: w.code.as_str(),
            message: w.message.clone(),
        })
        .collect()
}

pub fn verification_section(run: &JobRun) -> VerificationSection {
    let a = &run.annihilation;
    VerificationSection {
        passed: run.verified(),
        annihilation: AnnihilationSection {
            probes: a.probes,
            seed: a.seed,
            max_residual: a.max_residual,
            tolerance: a.tolerance,
            passed: a.passed(),
        },
        symmetry_consistent: run.symmetry.consistent,
        closed_form: run.closed_form.as_ref().map(|c| ClosedFormSection {
            case: c.case,
            literal: literal(&c.literal),
            agreement: c.agreement,
            tolerance: c.tolerance,
            passed: c.passed(),
        }),
    }
}

pub fn build_report(config: &Value, run: &JobRun) -> Report {
    Report {
        config: config.clone(),
        inertia: inertia_section(run),
        ctilde: ctilde_section(run),
        aeq: aeq_section(run),
        params: params_section(run),
        definiteness: definiteness_section(run),
        symmetry: symmetry_section(run),
        warnings: warning_entries(&run.warnings),
        verification: verification_section(run),
    }
}

pub fn suite_section(seed: u64, r: &SelfCheckReport) -> SuiteSection {
    SuiteSection {
        seed,
        passed: r.passed(),
        checks: r
            .checks
            .iter()
            .map(|c| CheckEntry {
                name: c.name,
                cases: c.cases,
                max_residual: c.max_residual,
                tolerance: c.tolerance,
                passed: c.passed,
            })
            .collect(),
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}
