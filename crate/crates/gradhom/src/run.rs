//! Executes a validated job and applies the configured tolerances.

use gradhom_core::homogenization::{
    analyze, closed_form_case, literal_params, symmetry_report, ClosedFormCase, HomogenizationResult, Model,
    NonlocalParams, SymmetryReport,
};
use gradhom_core::selfcheck::annihilation_probe;
use gradhom_core::tensor::{condensed_grad_matrix, Definiteness};
use gradhom_core::{Warning, WarningCode};

use crate::config::{Flags, Job, ModelKind, Tolerances};
use crate::error::{CliError, Result};

const CLOSED_FORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormCheck {
    pub case: &'static str,
    pub literal: NonlocalParams,
    pub agreement: f64,
    pub tolerance: f64,
}

impl ClosedFormCheck {
    pub fn passed(&self) -> bool {
        self.agreement <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnihilationCheck {
    pub probes: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl AnnihilationCheck {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobRun {
    pub model: ModelKind,
    pub erratum_sign_3d: bool,
    pub result: HomogenizationResult,
    /// Extraction residual within the structure tolerance.
    pub structural: bool,
    pub definiteness: Definiteness,
    pub symmetry: SymmetryReport,
    pub tolerances: Tolerances,
    pub closed_form: Option<ClosedFormCheck>,
    pub annihilation: AnnihilationCheck,
    pub warnings: Vec<Warning>,
}

impl JobRun {
    /// Every per-job check passed.
    pub fn verified(&self) -> bool {
        self.annihilation.passed()
            && self.symmetry.consistent
            && self.closed_form.as_ref().is_none_or(ClosedFormCheck::passed)
    }
}

fn closed_form(job: &Job, flags: &Flags, case: ClosedFormCase) -> Result<(HomogenizationResult, ClosedFormCheck)> {
    let name = case.name();
    let (result, literal, default_tol) = match case {
        ClosedFormCase::SquareCrack { .. } => {
            // The crack has no area; the core builds the thin-ellipse limit.
            let r = closed_form_case(&case)?;
            (r.result, r.literal, r.tolerance)
        }
        _ => {
            let m = job.microstructure(flags).expect("region inclusion")?;
            let result = analyze(
                &m,
                &Model::Catalog {
                    erratum_sign: flags.erratum_sign_3d,
                },
            )?;
            (result, literal_params(&case)?, CLOSED_FORM_TOLERANCE)
        }
    };
    let agreement = literal.relative_difference(result.params());
    let check = ClosedFormCheck {
        case: name,
        literal,
        agreement,
        tolerance: flags.tolerances.closed_form.unwrap_or(default_tol),
    };
    Ok((result, check))
}

pub fn run_job(job: &Job, flags: &Flags) -> Result<JobRun> {
    let (result, closed) = match job.closed_form_case(flags) {
        Some(case) => {
            let (r, c) = closed_form(job, flags, case)?;
            (r, Some(c))
        }
        None => {
            let model = match job.model {
                ModelKind::ExplicitCtilde => Model::Explicit(job.ctilde.clone().expect("validated")),
                ModelKind::FromEffective => Model::FromEffective(job.effective.clone().expect("validated")),
                ModelKind::Generic => Model::Catalog {
                    erratum_sign: flags.erratum_sign_3d,
                },
                other => {
                    return Err(CliError::config(format!(
                        "model {} does not match the given shapes",
                        other.as_str()
                    )))
                }
            };
            let m = job
                .microstructure(flags)
                .ok_or_else(|| CliError::config("only square_crack takes a crack inclusion"))??;
            (analyze(&m, &model)?, None)
        }
    };

    let tol = flags.tolerances.clone();
    let defaults = Tolerances::default();
    let structural = result.extraction.residual <= tol.structure;
    let mut warnings: Vec<Warning> = result
        .warnings
        .iter()
        .filter(|w| w.code != WarningCode::ExtractionResidual)
        .cloned()
        .collect();
    if !structural {
        warnings.push(Warning::new(
            WarningCode::ExtractionResidual,
            format!(
                "A_eq leaves the orthotropic parameter span (relative residual {:e} > {:e}); parameters are a least-squares fit",
                result.extraction.residual, tol.structure
            ),
        ));
    }
    let definiteness = if tol.definiteness == defaults.definiteness {
        result.definiteness.clone()
    } else {
        Definiteness::with_tolerance(&condensed_grad_matrix(&result.aeq), tol.definiteness)
    };
    let symmetry = if tol.classification == defaults.classification {
        result.symmetry.clone()
    } else {
        symmetry_report(&result.aeq, &result.ctilde, &result.b_rve, &result.frame, tol.classification)?
    };
    let max_residual = annihilation_probe(
        &result.ctilde,
        &result.b_rve,
        result.fraction,
        &result.aeq,
        flags.probes,
        flags.seed,
    )?;
    Ok(JobRun {
        model: job.model,
        erratum_sign_3d: flags.erratum_sign_3d,
        structural,
        definiteness,
        symmetry,
        annihilation: AnnihilationCheck {
            probes: flags.probes,
            seed: flags.seed,
            max_residual,
            tolerance: tol.annihilation,
        },
        tolerances: tol,
        closed_form: closed,
        warnings,
        result,
    })
}
