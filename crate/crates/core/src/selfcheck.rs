//! Built-in verification suite.
//!
//! Each check runs a family of seeded random or catalog cases and reports
//! the largest residual against its tolerance. The suite is deterministic
//! for a fixed [`SelfCheckConfig`].

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrepancy::IsotropicDiscrepancy;
use crate::geometry::{
    euler_tensor, monte_carlo_inertia, rve_inertia_decomposition, Microstructure, Phase, Shape,
    DEFAULT_DILUTE_THRESHOLD,
};
use crate::homogenization::{
    analyze, annihilation_residual, closed_form_case, effective_grad_tensor, spherical_case, ClosedFormCase, Model,
};
use crate::math::relative;
use crate::tensor::{
    desymmetrize, is_positive_definite, symmetrize, Dense, Dim, ElasticTensor, GradElasticTensor, Lame,
    OrthogonalTransform, QuadraticCoefficients, Rotate, SymMatrix, RAW_SYMMETRIES,
};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfCheckConfig {
    pub seed: u64,
    /// Random cases per check.
    pub cases: usize,
    /// Quadratic probes per annihilation case.
    pub probes: usize,
    pub monte_carlo_samples: usize,
    /// Test hook: scales one component orbit of every `A_eq` by `1 + p`
    /// before the annihilation check.
    pub perturbation: Option<f64>,
    pub annihilation_tolerance: f64,
    pub monte_carlo_tolerance: f64,
}

impl Default for SelfCheckConfig {
    fn default() -> Self {
        SelfCheckConfig {
            seed: 0x6772_6164,
            cases: 100,
            probes: 1000,
            monte_carlo_samples: 1_000_000,
            perturbation: None,
            annihilation_tolerance: 1e-12,
            monte_carlo_tolerance: 0.005,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheckReport {
    pub checks: Vec<CheckResult>,
}

impl SelfCheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    max: f64,
    /// Residual must exceed the tolerance instead (sensitivity checks).
    inverted: bool,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tally {
            name,
            tolerance,
            cases: 0,
            max: 0.0,
            inverted: false,
        }
    }

    fn push(&mut self, r: f64) {
        self.cases += 1;
        // NaN must fail the check, so it wins the max.
        if r.is_nan() || r > self.max {
            self.max = r;
        }
    }

    fn finish(self) -> CheckResult {
        let ok = !self.max.is_nan() && self.max <= self.tolerance;
        CheckResult {
            name: self.name,
            cases: self.cases,
            max_residual: self.max,
            tolerance: self.tolerance,
            passed: if self.inverted { !ok && !self.max.is_nan() } else { ok },
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn random_dims(k: usize) -> Dim {
    if k.is_multiple_of(2) {
        Dim::Two
    } else {
        Dim::Three
    }
}

fn random_elastic(rng: &mut ChaCha8Rng, dim: Dim) -> ElasticTensor {
    let raw = Dense::<4>::from_fn(dim, |_| uniform(rng, -1.0, 1.0));
    ElasticTensor::projected(&raw)
}

/// `R R^T` with a random `R`.
fn random_inertia(rng: &mut ChaCha8Rng, dim: Dim) -> SymMatrix {
    let n = dim.n();
    let r: Vec<f64> = (0..n * n).map(|_| uniform(rng, -1.0, 1.0)).collect();
    let rows: Vec<f64> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            (0..n).map(|k| r[i * n + k] * r[j * n + k]).sum()
        })
        .collect();
    SymMatrix::new(dim, &rows).expect("R R^T is symmetric")
}

fn random_beta(rng: &mut ChaCha8Rng, dim: Dim) -> QuadraticCoefficients {
    QuadraticCoefficients::projected(&Dense::<3>::from_fn(dim, |_| uniform(rng, -1.0, 1.0)))
}

fn check_reduction(rng: &mut ChaCha8Rng, cfg: &SelfCheckConfig) -> Result<CheckResult> {
    let mut t = Tally::new("spherical_reduction", 1e-12);
    for k in 0..cfg.cases {
        let dim = random_dims(k);
        let c = IsotropicDiscrepancy::new(uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0), dim).to_tensor();
        let f = uniform(rng, 1e-6, 0.05);
        let rho = uniform(rng, 0.05, 1.0);
        let a = effective_grad_tensor(&c, &SymMatrix::scalar(dim, rho * rho), f)?;
        let s = spherical_case(&c, rho, f)?;
        t.push(relative(a.max_abs_diff(&s), s.dense().max_abs()));
    }
    Ok(t.finish())
}

fn check_rect_circle(rng: &mut ChaCha8Rng, cfg: &SelfCheckConfig) -> Result<CheckResult> {
    let mut t = Tally::new("rect_circle_chain", 1e-12);
    for _ in 0..cfg.cases.min(25) {
        let case = ClosedFormCase::RectCircle {
            h1: uniform(rng, 0.5, 2.0),
            h2: uniform(rng, 0.5, 2.0),
            r: uniform(rng, 0.01, 0.1),
            k1: uniform(rng, 0.5, 3.0),
            mu1: uniform(rng, 0.5, 3.0),
            k2: uniform(rng, 0.0, 3.0),
            mu2: uniform(rng, 0.0, 3.0),
        };
        t.push(closed_form_case(&case)?.agreement);
    }
    Ok(t.finish())
}

fn check_box_sphere(rng: &mut ChaCha8Rng, cfg: &SelfCheckConfig) -> Result<CheckResult> {
    let mut t = Tally::new("box_sphere_chain", 1e-12);
    for k in 0..cfg.cases.min(10) {
        let case = ClosedFormCase::BoxSphere {
            h1: uniform(rng, 0.5, 2.0),
            h2: uniform(rng, 0.5, 2.0),
            h3: uniform(rng, 0.5, 2.0),
            r: uniform(rng, 0.01, 0.1),
            k1: uniform(rng, 0.5, 3.0),
            mu1: uniform(rng, 0.5, 3.0),
            k2: uniform(rng, 0.0, 3.0),
            mu2: uniform(rng, 0.0, 3.0),
            erratum_sign: k % 2 == 1,
        };
        t.push(closed_form_case(&case)?.agreement);
    }
    Ok(t.finish())
}

fn check_ellipse(rng: &mut ChaCha8Rng, cfg: &SelfCheckConfig) -> Result<CheckResult> {
    let mut t = Tally::new("square_ellipse_chain", 1e-12);
    for _ in 0..cfg.cases.min(25) {
        let mu1 = uniform(rng, 0.5, 2.0);
        let case = ClosedFormCase::SquareEllipse {
            lambda1: Lame::from_poisson_shear(uniform(rng, -0.9, 0.45), mu1).lambda,
            mu1,
            b1: uniform(rng, 0.05, 0.3),
            ratio: uniform(rng, 0.01, 1.0),
            side: 1.0,
        };
        t.push(closed_form_case(&case)?.agreement);
    }
    Ok(t.finish())
}

fn check_crack(cfg: &SelfCheckConfig) -> Result<CheckResult> {
    let mut t = Tally::new("crack_limit", 1e-6);
    let _ = cfg;
    for (lambda1, mu1) in [(1.0, 1.0), (0.0, 1.0), (-0.5, 1.0), (4.0, 1.0)] {
        let case = ClosedFormCase::SquareCrack {
            lambda1,
            mu1,
            b1: 0.2,
            side: 1.0,
        };
        t.push(closed_form_case(&case)?.agreement);
    }
    Ok(t.finish())
}

fn perturbed(a: &GradElasticTensor, p: Option<f64>) -> GradElasticTensor {
    match p {
        Some(p) => a.with_orbit_scaled([0, 0, 0, 0, 0, 0], 1.0 + p),
        None => a.clone(),
    }
}

fn check_annihilation(rng: &mut ChaCha8Rng, cfg: &SelfCheckConfig) -> Result<CheckResult> {
    let mut t = Tally::new("annihilation", cfg.annihilation_tolerance);
    for dim in [Dim::Two, Dim::Three] {
        let c = random_elastic(rng, dim);
        let b = random_inertia(rng, dim);
        let f = uniform(rng, 1e-3, 0.05);
        let a = perturbed(&effective_grad_tensor(&c, &b, f)?, cfg.perturbation);
        for _ in 0..cfg.probes {
            let beta = random_beta(rng, dim);
            let r = annihilation_residual(&c, &b, f, &a, &beta)?;
            let bn = beta.norm();
            t.push(relative(r.abs(), f * b.norm() * c.norm() * bn * bn));
        }
    }
    Ok(t.finish())
}

/// Largest normalized annihilation residual of `a` over `probes` random
/// quadratic fields, `|r(beta)| / (f |B| |C~| |beta|^2)`.
pub fn annihilation_probe(
    c: &ElasticTensor,
    b: &SymMatrix,
    f: f64,
    a: &GradElasticTensor,
    probes: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = f * b.norm() * c.norm();
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let beta = random_beta(&mut rng, c.dim());
        let bn = beta.norm();
        let r = annihilation_residual(c, b, f, a, &beta)?;
        let v = relative(r.abs(), scale * bn * bn);
        if v.is_nan() || v > worst {
            worst = v;
        }
    }
    Ok(worst)
}

fn check_perturbation_detected(rng: &mut ChaCha8Rng, cfg: &SelfCheckConfig) -> Result<CheckResult> {
    let mut t = Tally::new("perturbation_detected", cfg.annihilation_tolerance);
    t.inverted = true;
    for dim in [Dim::Two, Dim::Three] {
        let c = random_elastic(rng, dim);
        let b = random_inertia(rng, dim);
        let f = 0.02;
        let a = perturbed(&effective_grad_tensor(&c, &b, f)?, Some(0.1));
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.probes.min(100) {
            let beta = random_beta(rng, dim);
            let bn = beta.norm();
            let r = annihilation_residual(&c, &b, f, &a, &beta)?;
            worst = worst.max(relative(r.abs(), f * b.norm() * c.norm() * bn * bn));
        }
        // Largest residual found by any probe of this case; the check needs
        // every case to exceed the tolerance, so record the minimum of those.
        if t.cases == 0 || worst < t.max {
            t.max = worst;
        }
        t.cases += 1;
    }
    Ok(t.finish())
}

fn check_roundtrip(rng: &mut ChaCha8Rng, cfg: &SelfCheckConfig) -> Result<CheckResult> {
    let mut t = Tally::new("symmetrize_roundtrip", 1e-13);
    for k in 0..cfg.cases {
        let dim = random_dims(k);
        let a = GradElasticTensor::projected(&Dense::<6>::from_fn(dim, |_| uniform(rng, -1.0, 1.0)));
        let back = symmetrize(&desymmetrize(&a))?;
        t.push(relative(a.max_abs_diff(&back), a.dense().max_abs()));
    }
    Ok(t.finish())
}

fn check_commutation(rng: &mut ChaCha8Rng, cfg: &SelfCheckConfig) -> Result<CheckResult> {
    let mut t = Tally::new("rotation_commutation", 1e-12);
    for k in 0..cfg.cases {
        let dim = random_dims(k);
        let d = Dense::<6>::from_fn(dim, |_| uniform(rng, -1.0, 1.0)).group_average(&RAW_SYMMETRIES);
        let q = OrthogonalTransform::random(dim, rng);
        let lhs = symmetrize(&d.transformed(&q)?)?;
        let rhs = symmetrize(&d)?.rotate(&q)?;
        t.push(relative(lhs.max_abs_diff(&rhs), rhs.dense().max_abs()));
    }
    Ok(t.finish())
}

fn check_definiteness(rng: &mut ChaCha8Rng, cfg: &SelfCheckConfig) -> Result<CheckResult> {
    // Residual 1 marks a case that broke the law.
    let mut t = Tally::new("definiteness_law", 0.0);
    for k in 0..cfg.cases {
        let dim = random_dims(k);
        let negative = k % 4 < 2;
        let (lambda, mu) = if negative {
            let mu = -uniform(rng, 0.1, 2.0);
            let bulk = -uniform(rng, 0.1, 2.0);
            let lambda = match dim {
                Dim::Two => bulk - mu,
                Dim::Three => bulk - 2.0 * mu / 3.0,
            };
            (lambda, mu)
        } else {
            (uniform(rng, -2.0, 2.0), uniform(rng, 0.1, 2.0) * if k % 4 == 2 { 1.0 } else { -1.0 })
        };
        let iso = IsotropicDiscrepancy::new(lambda, mu, dim);
        let expect = iso.bulk() < 0.0 && iso.mu < 0.0;
        let b = SymMatrix::diagonal(&(0..dim.n()).map(|_| uniform(rng, 0.05, 0.5)).collect::<Vec<_>>())?;
        let a = effective_grad_tensor(&iso.to_tensor(), &b, uniform(rng, 1e-3, 0.05))?;
        let got = is_positive_definite(&a).positive_definite;
        t.push(if got == expect { 0.0 } else { 1.0 });
    }
    Ok(t.finish())
}

fn check_monte_carlo(cfg: &SelfCheckConfig) -> Result<CheckResult> {
    let mut t = Tally::new("monte_carlo_inertia", cfg.monte_carlo_tolerance);
    let shapes = [
        Shape::rectangle(2.0, 1.0)?,
        Shape::circle(1.0)?,
        Shape::ellipse(1.0, 0.4)?,
        Shape::cuboid(1.0, 2.0, 0.5)?,
        Shape::sphere(0.5)?,
    ];
    for (k, s) in shapes.iter().enumerate() {
        let mc = monte_carlo_inertia(s, cfg.monte_carlo_samples, cfg.seed.wrapping_add(k as u64))?;
        t.push(mc.relative_error(&euler_tensor(s)));
    }
    Ok(t.finish())
}

fn check_sum_rule() -> Result<CheckResult> {
    let mut t = Tally::new("inertia_sum_rule", 0.0);
    let cases = [
        (Shape::rectangle(2.0, 1.0)?, Shape::circle(0.1)?),
        (Shape::square(1.0)?, Shape::ellipse(0.2, 0.05)?),
        (Shape::cuboid(1.0, 2.0, 1.5)?, Shape::sphere(0.2)?),
        (
            Shape::cuboid(1.0, 1.0, 1.0)?,
            Shape::ellipsoid(0.2, 0.1, 0.05)?.rotated(&OrthogonalTransform::axis_rotation_3d(1, 0.3))?,
        ),
    ];
    for (rve, inc) in cases {
        let m = Microstructure::new(rve, inc, Lame::new(1.0, 1.0), Phase::Void, None, DEFAULT_DILUTE_THRESHOLD)?;
        t.push(rve_inertia_decomposition(&m)?.sum_rule_residual());
    }
    Ok(t.finish())
}

/// Scaling all lengths by `c` scales the parameters by `c^2` and leaves
/// `C~` alone; scaling all moduli by `c` scales both by `c`.
fn check_scaling(rng: &mut ChaCha8Rng) -> Result<CheckResult> {
    let mut t = Tally::new("unit_scaling", 1e-12);
    let catalog = Model::Catalog { erratum_sign: false };
    for _ in 0..5 {
        let (h1, h2, b1) = (uniform(rng, 0.8, 1.2), uniform(rng, 0.8, 1.2), uniform(rng, 0.05, 0.2));
        let lame = Lame::new(uniform(rng, 0.0, 2.0), uniform(rng, 0.5, 2.0));
        let c = uniform(rng, 0.5, 3.0);
        let build = |len: f64, modulus: f64| -> Result<_> {
            let m = Microstructure::new(
                Shape::rectangle(len * h1, len * h2)?,
                Shape::ellipse(len * b1, len * b1 / 2.0)?,
                lame.scaled(modulus),
                Phase::Void,
                None,
                DEFAULT_DILUTE_THRESHOLD,
            )?;
            analyze(&m, &catalog)
        };
        let base = build(1.0, 1.0)?;
        let long = build(c, 1.0)?;
        let stiff = build(1.0, c)?;
        t.push(base.params().scaled(c * c).relative_difference(long.params()));
        t.push(relative(base.ctilde.max_abs_diff(&long.ctilde), base.ctilde.dense().max_abs()));
        t.push(base.params().scaled(c).relative_difference(stiff.params()));
        t.push(relative(
            base.ctilde.scaled(c).max_abs_diff(&stiff.ctilde),
            stiff.ctilde.dense().max_abs(),
        ));
    }
    Ok(t.finish())
}

/// Runs every check; model errors abort the suite.
pub fn run_self_check(cfg: &SelfCheckConfig) -> Result<SelfCheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let checks = alloc::vec![
        check_reduction(&mut rng, cfg)?,
        check_rect_circle(&mut rng, cfg)?,
        check_box_sphere(&mut rng, cfg)?,
        check_ellipse(&mut rng, cfg)?,
        check_crack(cfg)?,
        check_annihilation(&mut rng, cfg)?,
        check_perturbation_detected(&mut rng, cfg)?,
        check_roundtrip(&mut rng, cfg)?,
        check_commutation(&mut rng, cfg)?,
        check_definiteness(&mut rng, cfg)?,
        check_monte_carlo(cfg)?,
        check_sum_rule()?,
        check_scaling(&mut rng)?,
    ];
    Ok(SelfCheckReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SelfCheckConfig {
        SelfCheckConfig {
            cases: 8,
            probes: 50,
            monte_carlo_samples: 20_000,
            ..SelfCheckConfig::default()
        }
    }

    #[test]
    fn quick_suite_passes_except_loose_monte_carlo() {
        let r = run_self_check(&quick()).unwrap();
        for c in &r.checks {
            if c.name != "monte_carlo_inertia" {
                assert!(c.passed, "{} failed: {:e} > {:e}", c.name, c.max_residual, c.tolerance);
            }
        }
    }

    #[test]
    fn perturbation_breaks_annihilation() {
        let cfg = SelfCheckConfig {
            perturbation: Some(0.1),
            ..quick()
        };
        let r = run_self_check(&cfg).unwrap();
        let a = r.checks.iter().find(|c| c.name == "annihilation").unwrap();
        assert!(!a.passed);
    }

    #[test]
    fn deterministic() {
        assert_eq!(run_self_check(&quick()).unwrap(), run_self_check(&quick()).unwrap());
    }
}
