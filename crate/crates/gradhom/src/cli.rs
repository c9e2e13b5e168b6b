//! Command-line surface. Exit codes: 0 ok, 1 config error, 2 model error,
//! 3 verification failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gradhom_core::homogenization::ellipse_sweep;
use gradhom_core::selfcheck::{run_self_check, SelfCheckConfig, SelfCheckReport};
use serde::Serialize;
use serde_json::Value;

use crate::config::{parse_config, Flags, Job, JobConfig, SweepSpec};
use crate::error::{CliError, Result};
use crate::report::{self, to_json};
use crate::run::{run_job, JobRun};
use crate::tables;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFICATION: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "gradhom", version, about = "Dilute second-gradient homogenization of two-phase elastic composites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized inertia of the RVE and its phases.
    Inertia(Common),
    /// First-order discrepancy tensor and its definiteness.
    Ctilde(Common),
    /// Full report: inertia, discrepancy, A_eq, parameters, checks.
    Homogenize(Common),
    /// Symmetry classes of A_eq, C~ and B.
    Classify(Common),
    /// Elliptic-hole parameters over semi-axis ratios and Poisson ratios.
    Sweep(Common),
    /// Built-in verification suite, or the checks of one job with --config.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Job config (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Output format; json for reports, csv for tables.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Use (mu1 - mu2) in the 3D spherical-inclusion shear term.
    #[arg(long)]
    pub erratum_sign_3d: bool,
    /// Seed of the random probes (default 1, or the suite seed for verify).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest relative extraction residual counted as structural.
    #[arg(long, value_parser = positive)]
    pub tol_structure: Option<f64>,
    /// Normalized annihilation residual bound.
    #[arg(long, value_parser = positive)]
    pub tol_annihilation: Option<f64>,
    /// Relative deviation under a probe still counted as invariant.
    #[arg(long, value_parser = positive)]
    pub tol_classification: Option<f64>,
    /// Smallest eigenvalue, relative to the largest, counted as positive.
    #[arg(long, value_parser = positive)]
    pub tol_definiteness: Option<f64>,
    /// Allowed relative gap between pipeline and closed form.
    #[arg(long, value_parser = positive)]
    pub tol_closed_form: Option<f64>,
    /// Allowed Monte-Carlo deviation of the Euler tensors.
    #[arg(long, value_parser = positive)]
    pub tol_monte_carlo: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Random cases per check.
    #[arg(long)]
    pub cases: Option<usize>,
    /// Monte-Carlo samples per shape.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Test hook: scale one component orbit of A_eq by 1 + p before the
    /// annihilation check.
    #[arg(long, hide = true)]
    pub inject_perturbation: Option<f64>,
}

/// Rendered output plus whether every check it carries passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub verified: bool,
    /// Human-readable summary for stderr.
    pub summary: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            verified: true,
            summary: None,
        }
    }
}

impl Common {
    fn apply(&self, flags: &mut Flags) {
        flags.erratum_sign_3d |= self.erratum_sign_3d;
        if let Some(s) = self.seed {
            flags.seed = s;
        }
        let t = &mut flags.tolerances;
        let pairs = [
            (self.tol_structure, &mut t.structure),
            (self.tol_annihilation, &mut t.annihilation),
            (self.tol_classification, &mut t.classification),
            (self.tol_definiteness, &mut t.definiteness),
            (self.tol_monte_carlo, &mut t.monte_carlo),
        ];
        for (v, slot) in pairs {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if self.tol_closed_form.is_some() {
            t.closed_form = self.tol_closed_form;
        }
    }

    fn load(&self) -> Result<Option<JobConfig>> {
        self.config.as_deref().map(parse_config).transpose()
    }

    fn job(&self) -> Result<(JobConfig, Job, Flags)> {
        let cfg = self
            .load()?
            .ok_or_else(|| CliError::config("this command needs --config"))?;
        let job = cfg
            .job
            .clone()
            .ok_or_else(|| CliError::config("the config describes no job (only a sweep)"))?;
        let mut flags = cfg.flags.clone();
        self.apply(&mut flags);
        Ok((cfg, job, flags))
    }

    fn format(&self, default: Format, allowed: &[Format], command: &str) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::config(format!("{command} does not support --format {f:?}").to_lowercase()))
        }
    }
}

#[derive(Serialize)]
struct Section<'a, T: Serialize> {
    config: &'a Value,
    #[serde(flatten)]
    body: T,
    warnings: Vec<report::WarningEntry>,
}

fn section<T: Serialize>(cfg: &JobConfig, run: &JobRun, body: T) -> Result<String> {
    Ok(to_json(&Section {
        config: &cfg.raw,
        body,
        warnings: report::warning_entries(&run.warnings),
    })?)
}

fn check_table(r: &SelfCheckReport) -> String {
    let mut s = String::new();
    for c in &r.checks {
        s.push_str(&format!(
            "{:<24} {:>6} cases  max {:>10.3e}  tol {:>8.1e}  {}\n",
            c.name,
            c.cases,
            c.max_residual,
            c.tolerance,
            if c.passed { "PASS" } else { "FAIL" }
        ));
    }
    s
}

fn job_summary(run: &JobRun) -> String {
    let a = &run.annihilation;
    let mut s = format!(
        "annihilation: max {:.3e} (tol {:.1e}) {}\nsymmetry consistent: {}\n",
        a.max_residual,
        a.tolerance,
        if a.passed() { "PASS" } else { "FAIL" },
        run.symmetry.consistent
    );
    if let Some(c) = &run.closed_form {
        s.push_str(&format!(
            "closed form {}: agreement {:.3e} (tol {:.1e}) {}\n",
            c.case,
            c.agreement,
            c.tolerance,
            if c.passed() { "PASS" } else { "FAIL" }
        ));
    }
    s
}

fn csv_string(write: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

fn sweep(c: &Common) -> Result<Outcome> {
    let format = c.format(Format::Csv, &[Format::Csv, Format::Json], "sweep")?;
    let spec = c.load()?.and_then(|cfg| cfg.sweep).unwrap_or_default();
    let SweepSpec {
        lambda_ratios,
        poisson_ratios,
        b1,
        mu1,
    } = spec;
    let rows = ellipse_sweep(&lambda_ratios, &poisson_ratios, b1, mu1)?;
    let text = match format {
        Format::Csv => csv_string(|b| tables::write_sweep(b, &rows))?,
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                lambda_ratio: f64,
                nu1: f64,
                a2_norm: f64,
                a4_norm: f64,
                a5_norm: f64,
                a6_norm: f64,
                a9_norm: f64,
            }
            let rows: Vec<Row> = rows
                .iter()
                .map(|r| Row {
                    lambda_ratio: r.lambda_ratio,
                    nu1: r.nu1,
                    a2_norm: r.a2_norm,
                    a4_norm: r.a4_norm,
                    a5_norm: r.a5_norm,
                    a6_norm: r.a6_norm,
                    a9_norm: r.a9_norm,
                })
                .collect();
            to_json(&rows)?
        }
    };
    Ok(Outcome::ok(text))
}

fn verify(v: &VerifyArgs) -> Result<Outcome> {
    let c = &v.common;
    if c.config.is_some() {
        c.format(Format::Json, &[Format::Json], "verify --config")?;
        let (cfg, job, flags) = c.job()?;
        let run = run_job(&job, &flags)?;
        return Ok(Outcome {
            text: to_json(&report::build_report(&cfg.raw, &run))?,
            verified: run.verified(),
            summary: Some(job_summary(&run)),
        });
    }
    let format = c.format(Format::Json, &[Format::Json, Format::Csv], "verify")?;
    let mut flags = Flags::default();
    c.apply(&mut flags);
    let mut sc = SelfCheckConfig {
        perturbation: v.inject_perturbation,
        annihilation_tolerance: flags.tolerances.annihilation,
        monte_carlo_tolerance: flags.tolerances.monte_carlo,
        ..SelfCheckConfig::default()
    };
    if let Some(s) = c.seed {
        sc.seed = s;
    }
    if let Some(n) = v.cases {
        sc.cases = n.max(1);
    }
    if let Some(n) = v.samples {
        sc.monte_carlo_samples = n;
    }
    let r = run_self_check(&sc)?;
    let text = match format {
        Format::Json => to_json(&report::suite_section(sc.seed, &r))?,
        Format::Csv => csv_string(|b| tables::write_checks(b, &r))?,
    };
    Ok(Outcome {
        text,
        verified: r.passed(),
        summary: Some(check_table(&r)),
    })
}

/// Runs a parsed command without touching stdout or the exit status.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Inertia(c) => {
            c.format(Format::Json, &[Format::Json], "inertia")?;
            let (cfg, job, flags) = c.job()?;
            let run = run_job(&job, &flags)?;
            #[derive(Serialize)]
            struct Body {
                inertia: report::InertiaSection,
            }
            Ok(Outcome::ok(section(&cfg, &run, Body { inertia: report::inertia_section(&run) })?))
        }
        Command::Ctilde(c) => {
            c.format(Format::Json, &[Format::Json], "ctilde")?;
            let (cfg, job, flags) = c.job()?;
            let run = run_job(&job, &flags)?;
            #[derive(Serialize)]
            struct Body {
                ctilde: report::CtildeSection,
            }
            Ok(Outcome::ok(section(&cfg, &run, Body { ctilde: report::ctilde_section(&run) })?))
        }
        Command::Classify(c) => {
            c.format(Format::Json, &[Format::Json], "classify")?;
            let (cfg, job, flags) = c.job()?;
            let run = run_job(&job, &flags)?;
            #[derive(Serialize)]
            struct Body {
                symmetry: report::SymmetrySection,
            }
            Ok(Outcome::ok(section(&cfg, &run, Body { symmetry: report::symmetry_section(&run) })?))
        }
        Command::Homogenize(c) => {
            let format = c.format(Format::Json, &[Format::Json, Format::Csv], "homogenize")?;
            let (cfg, job, flags) = c.job()?;
            let run = run_job(&job, &flags)?;
            let text = match format {
                Format::Json => to_json(&report::build_report(&cfg.raw, &run))?,
                Format::Csv => csv_string(|b| tables::write_condensed(b, &run.result.aeq))?,
            };
            Ok(Outcome {
                text,
                verified: run.verified(),
                summary: (!run.verified()).then(|| job_summary(&run)),
            })
        }
        Command::Sweep(c) => sweep(c),
        Command::Verify(v) => verify(v),
    }
}

fn output_path(cmd: &Command) -> Option<&PathBuf> {
    match cmd {
        Command::Inertia(c)
        | Command::Ctilde(c)
        | Command::Homogenize(c)
        | Command::Classify(c)
        | Command::Sweep(c) => c.output.as_ref(),
        Command::Verify(v) => v.common.output.as_ref(),
    }
}

/// Executes, writes the output, and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let outcome = execute(&cli.command).and_then(|o| {
        match output_path(&cli.command) {
            Some(p) => fs::write(p, &o.text).map_err(|source| CliError::Write {
                path: p.clone(),
                source,
            })?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(o.text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Write {
                        path: PathBuf::from("<stdout>"),
                        source,
                    })?;
            }
        }
        Ok(o)
    });
    match outcome {
        Ok(o) => {
            if let Some(s) = &o.summary {
                eprint!("{s}");
            }
            if o.verified {
                EXIT_OK
            } else {
                eprintln!("gradhom: verification failed");
                EXIT_VERIFICATION
            }
        }
        Err(e) => {
            eprintln!("gradhom: {e}");
            e.exit_code()
        }
    }
}
