//! Job config: JSON, `"schema_version": 1`.
//!
//! Validation walks the whole document and reports every violation it finds,
//! each prefixed with its JSON path. Unknown keys are errors.

use std::fmt::Display;
use std::path::Path;

use gradhom_core::discrepancy::{Discrepancy, IsotropicDiscrepancy, OrthotropicDiscrepancy};
use gradhom_core::geometry::{Microstructure, Phase, Shape, ShapeKind, DEFAULT_DILUTE_THRESHOLD};
use gradhom_core::homogenization::{figure_grid, ClosedFormCase};
use gradhom_core::{Dim, ElasticTensor, Lame, OrthogonalTransform};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u64 = 1;

const TOP_KEYS: &[&str] = &[
    "schema_version",
    "description",
    "dimension",
    "model",
    "rve",
    "inclusion",
    "matrix",
    "f",
    "ctilde",
    "effective",
    "flags",
    "sweep",
];
const JOB_KEYS: &[&str] = &["dimension", "model", "rve", "inclusion", "matrix", "f", "ctilde", "effective"];
const MODULI_KEYS: &[&str] = &["lambda", "mu", "K", "E", "nu"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Generic,
    RectCircle,
    BoxSphere,
    SquareEllipse,
    SquareCrack,
    ExplicitCtilde,
    FromEffective,
}

impl ModelKind {
    const ALL: [ModelKind; 7] = [
        ModelKind::Generic,
        ModelKind::RectCircle,
        ModelKind::BoxSphere,
        ModelKind::SquareEllipse,
        ModelKind::SquareCrack,
        ModelKind::ExplicitCtilde,
        ModelKind::FromEffective,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Generic => "generic",
            ModelKind::RectCircle => "rect_circle",
            ModelKind::BoxSphere => "box_sphere",
            ModelKind::SquareEllipse => "square_ellipse",
            ModelKind::SquareCrack => "square_crack",
            ModelKind::ExplicitCtilde => "explicit_ctilde",
            ModelKind::FromEffective => "from_effective",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s)
    }

    fn needs_material(self) -> bool {
        matches!(self, ModelKind::Generic | ModelKind::RectCircle | ModelKind::BoxSphere)
    }
}

/// Inclusion geometry; cracks have no area and exist only for `square_crack`.
#[derive(Debug, Clone, PartialEq)]
pub enum InclusionShape {
    Region(Shape),
    Crack { b1: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Relative extraction residual certifying the orthotropic structure.
    pub structure: f64,
    pub annihilation: f64,
    pub classification: f64,
    pub definiteness: f64,
    /// Literal vs generic agreement; `None` keeps the per-case default.
    pub closed_form: Option<f64>,
    pub monte_carlo: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structure: gradhom_core::homogenization::STRUCTURE_TOLERANCE,
            annihilation: 1e-12,
            classification: gradhom_core::tensor::CLASSIFICATION_TOLERANCE,
            definiteness: gradhom_core::tensor::Definiteness::RELATIVE_TOLERANCE,
            closed_form: None,
            monte_carlo: 0.005,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flags {
    pub erratum_sign_3d: bool,
    pub seed: u64,
    pub dilute_threshold: f64,
    /// Random quadratic fields used by the per-job annihilation check.
    pub probes: usize,
    pub tolerances: Tolerances,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            erratum_sign_3d: false,
            seed: 1,
            dilute_threshold: DEFAULT_DILUTE_THRESHOLD,
            probes: 100,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub dimension: Dim,
    pub model: ModelKind,
    pub rve: Shape,
    pub inclusion: InclusionShape,
    /// `None` when the discrepancy comes from `ctilde` or `effective`.
    pub material: Option<Phase>,
    pub matrix: Lame,
    pub fraction: Option<f64>,
    pub ctilde: Option<Discrepancy>,
    pub effective: Option<ElasticTensor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub lambda_ratios: Vec<f64>,
    pub poisson_ratios: Vec<f64>,
    pub b1: f64,
    pub mu1: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        let (lambda_ratios, poisson_ratios) = figure_grid();
        SweepSpec {
            lambda_ratios,
            poisson_ratios,
            b1: 1.0,
            mu1: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    /// The document as read, echoed into reports.
    pub raw: Value,
    pub job: Option<Job>,
    pub sweep: Option<SweepSpec>,
    pub flags: Flags,
}

impl Job {
    fn phase(&self) -> Phase {
        self.material.unwrap_or(Phase::Void)
    }

    /// `None` for the crack, which has no area.
    pub fn microstructure(&self, flags: &Flags) -> Option<gradhom_core::Result<Microstructure>> {
        match &self.inclusion {
            InclusionShape::Region(s) => Some(Microstructure::new(
                self.rve.clone(),
                s.clone(),
                self.matrix,
                self.phase(),
                self.fraction,
                flags.dilute_threshold,
            )),
            InclusionShape::Crack { .. } => None,
        }
    }

    /// The literal closed-form case named by `model`, if any.
    pub fn closed_form_case(&self, flags: &Flags) -> Option<ClosedFormCase> {
        let inc = match self.phase() {
            Phase::Elastic(l) => l,
            Phase::Void => Lame::new(0.0, 0.0),
        };
        let dim = self.dimension;
        let m = self.matrix;
        match (self.model, self.rve.kind(), &self.inclusion) {
            (ModelKind::RectCircle, ShapeKind::Rectangle { h1, h2 }, InclusionShape::Region(s)) => match s.kind() {
                ShapeKind::Circle { r } => Some(ClosedFormCase::RectCircle {
                    h1: *h1,
                    h2: *h2,
                    r: *r,
                    k1: m.bulk(dim),
                    mu1: m.mu,
                    k2: inc.bulk(dim),
                    mu2: inc.mu,
                }),
                _ => None,
            },
            (ModelKind::BoxSphere, ShapeKind::Box { h1, h2, h3 }, InclusionShape::Region(s)) => match s.kind() {
                ShapeKind::Sphere { r } => Some(ClosedFormCase::BoxSphere {
                    h1: *h1,
                    h2: *h2,
                    h3: *h3,
                    r: *r,
                    k1: m.bulk(dim),
                    mu1: m.mu,
                    k2: inc.bulk(dim),
                    mu2: inc.mu,
                    erratum_sign: flags.erratum_sign_3d,
                }),
                _ => None,
            },
            (ModelKind::SquareEllipse, ShapeKind::Rectangle { h1, .. }, InclusionShape::Region(s)) => match s.kind() {
                ShapeKind::Ellipse { b1, b2 } => Some(ClosedFormCase::SquareEllipse {
                    lambda1: m.lambda,
                    mu1: m.mu,
                    b1: *b1,
                    ratio: b2 / b1,
                    side: *h1,
                }),
                _ => None,
            },
            (ModelKind::SquareCrack, ShapeKind::Rectangle { h1, .. }, InclusionShape::Crack { b1 }) => {
                Some(ClosedFormCase::SquareCrack {
                    lambda1: m.lambda,
                    mu1: m.mu,
                    b1: *b1,
                    side: *h1,
                })
            }
            _ => None,
        }
    }
}

/// Reads and validates a config file.
pub fn parse_config(path: &Path) -> Result<JobConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<JobConfig> {
    let raw: Value = serde_json::from_str(text).map_err(|e| CliError::config(format!("not valid JSON: {e}")))?;
    let mut ch = Checker::default();
    let cfg = ch.document(&raw);
    match cfg {
        Some(cfg) if ch.errors.is_empty() => Ok(cfg),
        _ => Err(CliError::Config(ch.errors)),
    }
}

#[derive(Default)]
struct Checker {
    errors: Vec<String>,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

impl Checker {
    fn err(&mut self, path: &str, msg: impl Display) {
        let at = if path.is_empty() { "(root)" } else { path };
        self.errors.push(format!("{at}: {msg}"));
    }

    fn object<'a>(&mut self, v: &'a Value, path: &str, allowed: &[&str]) -> Option<&'a Map<String, Value>> {
        let Some(m) = v.as_object() else {
            self.err(path, "expected an object");
            return None;
        };
        for k in m.keys() {
            if !allowed.contains(&k.as_str()) {
                self.err(&join(path, k), format!("unknown key (allowed: {})", allowed.join(", ")));
            }
        }
        Some(m)
    }

    fn number_value(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.err(path, "expected a finite number");
                None
            }
        }
    }

    fn opt_number(&mut self, m: &Map<String, Value>, key: &str, path: &str) -> Option<f64> {
        m.get(key).and_then(|v| self.number_value(v, &join(path, key)))
    }

    fn number(&mut self, m: &Map<String, Value>, key: &str, path: &str) -> Option<f64> {
        if !m.contains_key(key) {
            self.err(&join(path, key), "missing required number");
            return None;
        }
        self.opt_number(m, key, path)
    }

    fn positive(&mut self, m: &Map<String, Value>, key: &str, path: &str) -> Option<f64> {
        let x = self.number(m, key, path)?;
        if x > 0.0 {
            Some(x)
        } else {
            self.err(&join(path, key), format!("must be positive, got {x}"));
            None
        }
    }

    fn numbers(&mut self, v: &Value, path: &str) -> Option<Vec<f64>> {
        let Some(a) = v.as_array() else {
            self.err(path, "expected an array of numbers");
            return None;
        };
        let out: Vec<Option<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, x)| self.number_value(x, &format!("{path}[{i}]")))
            .collect();
        out.into_iter().collect()
    }

    fn document(&mut self, raw: &Value) -> Option<JobConfig> {
        let top = self.object(raw, "", TOP_KEYS)?;
        match top.get("schema_version") {
            None => self.err("schema_version", "missing (expected 1)"),
            Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
            Some(v) => self.err("schema_version", format!("unsupported version {v} (expected 1)")),
        }
        if let Some(d) = top.get("description") {
            if !d.is_string() {
                self.err("description", "expected a string");
            }
        }
        let flags = top.get("flags").map(|v| self.flags(v)).unwrap_or_default();
        let sweep = top.get("sweep").and_then(|v| self.sweep(v));
        let has_job = JOB_KEYS.iter().any(|k| top.contains_key(*k));
        let job = if has_job || !top.contains_key("sweep") {
            self.job(top, &flags)
        } else {
            None
        };
        Some(JobConfig {
            raw: raw.clone(),
            job,
            sweep,
            flags,
        })
    }

    fn flags(&mut self, v: &Value) -> Flags {
        let mut out = Flags::default();
        let path = "flags";
        let Some(m) = self.object(v, path, &["erratum_sign_3d", "seed", "dilute_threshold", "probes", "tolerances"])
        else {
            return out;
        };
        if let Some(b) = m.get("erratum_sign_3d") {
            match b.as_bool() {
                Some(b) => out.erratum_sign_3d = b,
                None => self.err("flags.erratum_sign_3d", "expected a boolean"),
            }
        }
        if let Some(s) = m.get("seed") {
            match s.as_u64() {
                Some(s) => out.seed = s,
                None => self.err("flags.seed", "expected a non-negative integer"),
            }
        }
        if let Some(s) = m.get("probes") {
            match s.as_u64() {
                Some(s) if s > 0 => out.probes = s as usize,
                _ => self.err("flags.probes", "expected a positive integer"),
            }
        }
        if let Some(t) = self.opt_number(m, "dilute_threshold", path) {
            if t > 0.0 && t <= 1.0 {
                out.dilute_threshold = t;
            } else {
                self.err("flags.dilute_threshold", format!("must lie in (0, 1], got {t}"));
            }
        }
        if let Some(t) = m.get("tolerances") {
            let path = "flags.tolerances";
            if let Some(tm) = self.object(
                t,
                path,
                &["structure", "annihilation", "classification", "definiteness", "closed_form", "monte_carlo"],
            ) {
                let tol = &mut out.tolerances;
                let set = |ch: &mut Checker, key: &str, slot: &mut f64| {
                    if let Some(x) = ch.opt_number(tm, key, path) {
                        if x > 0.0 {
                            *slot = x;
                        } else {
                            ch.err(&join(path, key), format!("must be positive, got {x}"));
                        }
                    }
                };
                set(self, "structure", &mut tol.structure);
                set(self, "annihilation", &mut tol.annihilation);
                set(self, "classification", &mut tol.classification);
                set(self, "definiteness", &mut tol.definiteness);
                set(self, "monte_carlo", &mut tol.monte_carlo);
                let mut cf = f64::NAN;
                set(self, "closed_form", &mut cf);
                if !cf.is_nan() {
                    tol.closed_form = Some(cf);
                }
            }
        }
        out
    }

    fn sweep(&mut self, v: &Value) -> Option<SweepSpec> {
        let path = "sweep";
        let m = self.object(v, path, &["lambda_ratios", "poisson_ratios", "b1", "mu1"])?;
        let mut out = SweepSpec::default();
        let before = self.errors.len();
        if let Some(r) = m.get("lambda_ratios") {
            if let Some(r) = self.numbers(r, "sweep.lambda_ratios") {
                for (i, x) in r.iter().enumerate() {
                    if !(*x > 0.0 && *x <= 1.0) {
                        self.err(&format!("sweep.lambda_ratios[{i}]"), format!("{x} is outside (0, 1]"));
                    }
                }
                out.lambda_ratios = r;
            }
        }
        if let Some(r) = m.get("poisson_ratios") {
            if let Some(r) = self.numbers(r, "sweep.poisson_ratios") {
                for (i, x) in r.iter().enumerate() {
                    if !(*x > -1.0 && *x < 0.5) {
                        self.err(&format!("sweep.poisson_ratios[{i}]"), format!("{x} is outside (-1, 0.5)"));
                    }
                }
                out.poisson_ratios = r;
            }
        }
        if m.contains_key("b1") {
            out.b1 = self.positive(m, "b1", path)?;
        }
        if m.contains_key("mu1") {
            out.mu1 = self.positive(m, "mu1", path)?;
        }
        (self.errors.len() == before).then_some(out)
    }

    fn dimension(&mut self, top: &Map<String, Value>) -> Option<Dim> {
        match top.get("dimension") {
            None => {
                self.err("dimension", "missing (2 or 3)");
                None
            }
            Some(v) => match v.as_u64() {
                Some(2) => Some(Dim::Two),
                Some(3) => Some(Dim::Three),
                _ => {
                    self.err("dimension", format!("expected 2 or 3, got {v}"));
                    None
                }
            },
        }
    }

    fn model(&mut self, top: &Map<String, Value>) -> Option<ModelKind> {
        let names: Vec<&str> = ModelKind::ALL.iter().map(|m| m.as_str()).collect();
        match top.get("model") {
            None => {
                self.err("model", format!("missing (one of {})", names.join(", ")));
                None
            }
            Some(v) => {
                let m = v.as_str().and_then(ModelKind::parse);
                if m.is_none() {
                    self.err("model", format!("unknown model {v} (one of {})", names.join(", ")));
                }
                m
            }
        }
    }

    fn orientation(&mut self, v: &Value, path: &str, dim: Dim) -> Option<OrthogonalTransform> {
        if let Some(angle) = v.as_f64() {
            if dim == Dim::Two {
                return Some(OrthogonalTransform::rotation_2d(angle));
            }
            self.err(path, "a single angle is only meaningful in 2D; give a 3x3 rotation matrix");
            return None;
        }
        let rows = v.as_array().filter(|r| r.len() == dim.n());
        let Some(rows) = rows else {
            self.err(path, format!("expected an angle (2D) or a {0}x{0} matrix", dim.n()));
            return None;
        };
        let mut flat = Vec::with_capacity(dim.n() * dim.n());
        for (i, r) in rows.iter().enumerate() {
            let r = self.numbers(r, &format!("{path}[{i}]"))?;
            if r.len() != dim.n() {
                self.err(&format!("{path}[{i}]"), format!("expected {} entries", dim.n()));
                return None;
            }
            flat.extend(r);
        }
        match OrthogonalTransform::new(dim, &flat) {
            Ok(q) if q.determinant() > 0.0 => Some(q),
            Ok(_) => {
                self.err(path, "must be a proper rotation (determinant +1)");
                None
            }
            Err(e) => {
                self.err(path, e);
                None
            }
        }
    }

    /// Shape fragment; `extra` lists keys owned by the caller.
    fn shape(&mut self, v: &Value, path: &str, dim: Dim, extra: &[&str], allow_crack: bool) -> Option<InclusionShape> {
        let m = v.as_object().or_else(|| {
            self.err(path, "expected an object");
            None
        })?;
        let Some(kind) = m.get("shape").and_then(Value::as_str) else {
            self.err(&join(path, "shape"), "missing shape name");
            return None;
        };
        let params: &[&str] = match kind {
            "rectangle" => &["h1", "h2"],
            "box" => &["h1", "h2", "h3"],
            "square" | "cube" => &["h"],
            "circle" | "sphere" => &["r"],
            "ellipse" => &["b1", "b2"],
            "ellipsoid" => &["b1", "b2", "b3"],
            "polygon" => &["vertices"],
            "crack" if allow_crack => &["b1"],
            "crack" => {
                self.err(&join(path, "shape"), "cracks are only available as the inclusion of model square_crack");
                return None;
            }
            other => {
                self.err(
                    &join(path, "shape"),
                    format!("unknown shape {other:?} (rectangle, square, box, cube, circle, ellipse, sphere, ellipsoid, polygon, crack)"),
                );
                return None;
            }
        };
        let mut allowed = vec!["shape", "orientation"];
        allowed.extend_from_slice(params);
        allowed.extend_from_slice(extra);
        self.object(v, path, &allowed)?;

        let before = self.errors.len();
        let vals: Vec<Option<f64>> = params
            .iter()
            .filter(|p| **p != "vertices")
            .map(|p| self.positive(m, p, path))
            .collect();
        if self.errors.len() != before {
            return None;
        }
        let x: Vec<f64> = vals.into_iter().map(|v| v.unwrap()).collect();
        let built = match kind {
            "rectangle" => Shape::rectangle(x[0], x[1]),
            "square" => Shape::square(x[0]),
            "box" => Shape::cuboid(x[0], x[1], x[2]),
            "cube" => Shape::cuboid(x[0], x[0], x[0]),
            "circle" => Shape::circle(x[0]),
            "sphere" => Shape::sphere(x[0]),
            "ellipse" => Shape::ellipse(x[0], x[1]),
            "ellipsoid" => Shape::ellipsoid(x[0], x[1], x[2]),
            "crack" => {
                if dim != Dim::Two {
                    self.err(path, "cracks are 2D");
                    return None;
                }
                if m.contains_key("orientation") {
                    self.err(&join(path, "orientation"), "the crack must lie along the first axis");
                }
                return Some(InclusionShape::Crack { b1: x[0] });
            }
            _ => {
                let Some(list) = m.get("vertices").and_then(Value::as_array) else {
                    self.err(&join(path, "vertices"), "expected an array of [x, y] pairs");
                    return None;
                };
                let mut vs = Vec::with_capacity(list.len());
                for (i, p) in list.iter().enumerate() {
                    let at = format!("{path}.vertices[{i}]");
                    match self.numbers(p, &at) {
                        Some(p) if p.len() == 2 => vs.push([p[0], p[1]]),
                        Some(_) => self.err(&at, "expected an [x, y] pair"),
                        None => {}
                    }
                }
                if vs.len() != list.len() {
                    return None;
                }
                Shape::polygon(vs)
            }
        };
        let mut shape = match built {
            Ok(s) => s,
            Err(e) => {
                self.err(path, e);
                return None;
            }
        };
        if shape.dim() != dim {
            self.err(path, format!("{kind} is {}D but the job is {}D", shape.dim().n(), dim.n()));
            return None;
        }
        if let Some(o) = m.get("orientation") {
            let q = self.orientation(o, &join(path, "orientation"), dim)?;
            shape = match shape.rotated(&q) {
                Ok(s) => s,
                Err(e) => {
                    self.err(path, e);
                    return None;
                }
            };
        }
        Some(InclusionShape::Region(shape))
    }

    /// Two of `lambda, mu, K, E, nu`; `K` is the bulk modulus of the job's
    /// dimension (plane strain in 2D).
    fn moduli(&mut self, v: &Value, path: &str, dim: Dim) -> Option<Lame> {
        let m = self.object(v, path, MODULI_KEYS)?;
        let given: Vec<&str> = MODULI_KEYS.iter().copied().filter(|k| m.contains_key(*k)).collect();
        let get = |ch: &mut Checker, k: &str| ch.number(m, k, path);
        let lame = match given.as_slice() {
            ["lambda", "mu"] => Lame::new(get(self, "lambda")?, get(self, "mu")?),
            ["mu", "K"] => Lame::from_bulk_shear(get(self, "K")?, get(self, "mu")?, dim),
            ["E", "nu"] => Lame::from_young_poisson(get(self, "E")?, get(self, "nu")?),
            ["mu", "nu"] => Lame::from_poisson_shear(get(self, "nu")?, get(self, "mu")?),
            _ => {
                self.err(
                    path,
                    format!(
                        "give exactly one of the pairs (lambda, mu), (K, mu), (E, nu), (nu, mu); got [{}]",
                        given.join(", ")
                    ),
                );
                return None;
            }
        };
        if lame.lambda.is_finite() && lame.mu.is_finite() {
            Some(lame)
        } else {
            self.err(path, "moduli conversion is singular (nu = 0.5 or nu = -1)");
            None
        }
    }

    fn material(&mut self, v: &Value, path: &str, dim: Dim) -> Option<Phase> {
        if let Some(s) = v.as_str() {
            if s == "void" {
                return Some(Phase::Void);
            }
            self.err(path, format!("expected \"void\" or a moduli object, got {s:?}"));
            return None;
        }
        let l = self.moduli(v, path, dim)?;
        if l.mu < 0.0 || l.bulk(dim) < 0.0 {
            self.err(path, format!("inclusion moduli must be non-negative (mu = {}, K = {})", l.mu, l.bulk(dim)));
            return None;
        }
        Some(Phase::Elastic(l))
    }

    fn tensor4(&mut self, v: &Value, path: &str, dim: Dim) -> Option<ElasticTensor> {
        match crate::tensor_json::parse_dense::<4>(v) {
            Ok(d) if d.dim() == dim => match ElasticTensor::from_dense(d) {
                Ok(t) => Some(t),
                Err(e) => {
                    self.err(path, e);
                    None
                }
            },
            Ok(d) => {
                self.err(path, format!("tensor is {}D but the job is {}D", d.dim().n(), dim.n()));
                None
            }
            Err(e) => {
                self.err(path, e);
                None
            }
        }
    }

    fn ctilde(&mut self, v: &Value, dim: Dim) -> Option<Discrepancy> {
        let path = "ctilde";
        let m = self.object(v, path, &["lambda", "mu", "xi", "omega", "orientation", "tensor"])?;
        if let Some(t) = m.get("tensor") {
            if m.len() > 1 {
                self.err(path, "give either \"tensor\" or moduli, not both");
                return None;
            }
            return self.tensor4(t, "ctilde.tensor", dim).map(Discrepancy::Full);
        }
        let lambda = self.number(m, "lambda", path);
        let mu = self.number(m, "mu", path);
        let (lambda, mu) = (lambda?, mu?);
        let orthotropic = ["xi", "omega", "orientation"].iter().any(|k| m.contains_key(*k));
        if !orthotropic {
            return Some(IsotropicDiscrepancy::new(lambda, mu, dim).into());
        }
        if dim != Dim::Two {
            self.err(path, "xi, omega and orientation describe the 2D orthotropic form; use \"tensor\" in 3D");
            return None;
        }
        let xi = self.opt_number(m, "xi", path).unwrap_or(0.0);
        let omega = self.opt_number(m, "omega", path).unwrap_or(0.0);
        let axes = match m.get("orientation") {
            Some(o) => self.orientation(o, "ctilde.orientation", dim)?,
            None => OrthogonalTransform::identity(dim),
        };
        Some(Discrepancy::Orthotropic(OrthotropicDiscrepancy {
            lambda,
            mu,
            xi,
            omega,
            axes,
        }))
    }

    fn effective(&mut self, v: &Value, dim: Dim) -> Option<ElasticTensor> {
        let path = "effective";
        if let Some(t) = v.as_object().and_then(|m| m.get("tensor")) {
            self.object(v, path, &["tensor"])?;
            return self.tensor4(t, "effective.tensor", dim);
        }
        self.moduli(v, path, dim).map(|l| ElasticTensor::isotropic(l, dim))
    }

    fn job(&mut self, top: &Map<String, Value>, flags: &Flags) -> Option<Job> {
        let dim = self.dimension(top);
        let model = self.model(top);
        let dim = dim?;
        let rve = top.get("rve").map(|v| self.shape(v, "rve", dim, &[], false));
        if rve.is_none() {
            self.err("rve", "missing RVE shape");
        }
        let allow_crack = model == Some(ModelKind::SquareCrack);
        let inclusion = top
            .get("inclusion")
            .map(|v| self.shape(v, "inclusion", dim, &["material"], allow_crack));
        if inclusion.is_none() {
            self.err("inclusion", "missing inclusion shape");
        }
        let material = top
            .get("inclusion")
            .and_then(|v| v.get("material"))
            .map(|v| self.material(v, "inclusion.material", dim));
        let matrix = match top.get("matrix") {
            Some(v) => self.moduli(v, "matrix", dim),
            None => {
                self.err("matrix", "missing matrix moduli");
                None
            }
        };
        if let Some(l) = matrix {
            if !(l.mu > 0.0 && l.bulk(dim) > 0.0) {
                self.err("matrix", format!("matrix must be stable (mu = {}, K = {})", l.mu, l.bulk(dim)));
            }
        }
        let fraction = self.opt_number(top, "f", "");
        if let Some(f) = fraction {
            if !(0.0..=1.0).contains(&f) {
                self.err("f", format!("must lie in [0, 1], got {f}"));
            }
        }
        let ctilde = top.get("ctilde").map(|v| self.ctilde(v, dim));
        let effective = top.get("effective").map(|v| self.effective(v, dim));

        let model = model?;
        self.provenance(model, material.is_some(), ctilde.is_some(), effective.is_some());
        let rve = match rve?? {
            InclusionShape::Region(s) => s,
            InclusionShape::Crack { .. } => return None,
        };
        let inclusion = inclusion??;
        let matrix = matrix?;
        let material = match material {
            Some(m) => Some(m?),
            None => None,
        };
        let job = Job {
            dimension: dim,
            model,
            rve,
            inclusion,
            material,
            matrix,
            fraction,
            ctilde: ctilde.flatten(),
            effective: effective.flatten(),
        };
        self.model_shapes(&job);
        if let Some(Err(e)) = job.microstructure(flags) {
            self.err("inclusion", e);
        }
        Some(job)
    }

    /// Exactly one source for the discrepancy tensor.
    fn provenance(&mut self, model: ModelKind, material: bool, ctilde: bool, effective: bool) {
        let name = model.as_str();
        if model.needs_material() && !material {
            self.err("inclusion.material", format!("model {name} needs the inclusion material (moduli or \"void\")"));
        }
        match model {
            ModelKind::ExplicitCtilde => {
                if !ctilde {
                    self.err("ctilde", "model explicit_ctilde needs a ctilde object");
                }
            }
            ModelKind::FromEffective => {
                if !effective {
                    self.err("effective", "model from_effective needs the effective stiffness");
                }
            }
            _ => {}
        }
        if ctilde && model != ModelKind::ExplicitCtilde {
            self.err("ctilde", format!("only used by model explicit_ctilde, not {name}"));
        }
        if effective && model != ModelKind::FromEffective {
            self.err("effective", format!("only used by model from_effective, not {name}"));
        }
        if material && matches!(model, ModelKind::ExplicitCtilde | ModelKind::FromEffective) {
            self.err(
                "inclusion.material",
                format!("model {name} takes the discrepancy from elsewhere; drop the inclusion material"),
            );
        }
    }

    fn model_shapes(&mut self, job: &Job) {
        let name = job.model.as_str();
        let aligned = |s: &Shape| s.orientation().is_none();
        let rve_kind = job.rve.kind();
        let square = matches!(rve_kind, ShapeKind::Rectangle { h1, h2 } if h1 == h2);
        let inc = match &job.inclusion {
            InclusionShape::Region(s) => Some(s),
            InclusionShape::Crack { .. } => None,
        };
        match job.model {
            ModelKind::RectCircle => {
                if !matches!(rve_kind, ShapeKind::Rectangle { .. }) || !aligned(&job.rve) {
                    self.err("rve", format!("model {name} needs an axis-aligned rectangle"));
                }
                if !matches!(inc.map(|s| s.kind()), Some(ShapeKind::Circle { .. })) {
                    self.err("inclusion", format!("model {name} needs a circular inclusion"));
                }
            }
            ModelKind::BoxSphere => {
                if !matches!(rve_kind, ShapeKind::Box { .. }) || !aligned(&job.rve) {
                    self.err("rve", format!("model {name} needs an axis-aligned box"));
                }
                if !matches!(inc.map(|s| s.kind()), Some(ShapeKind::Sphere { .. })) {
                    self.err("inclusion", format!("model {name} needs a spherical inclusion"));
                }
            }
            ModelKind::SquareEllipse | ModelKind::SquareCrack => {
                if !square || !aligned(&job.rve) {
                    self.err("rve", format!("model {name} needs an axis-aligned square"));
                }
                if matches!(job.material, Some(Phase::Elastic(_))) {
                    self.err("inclusion.material", format!("model {name} describes holes; use \"void\""));
                }
                if job.model == ModelKind::SquareCrack {
                    if inc.is_some() {
                        self.err("inclusion", format!("model {name} needs {{\"shape\": \"crack\", \"b1\": ..}}"));
                    }
                    if job.fraction.is_some() {
                        self.err("f", "a crack has no area; omit f");
                    }
                } else {
                    match inc {
                        Some(s) if !aligned(s) => {
                            self.err("inclusion.orientation", format!("model {name} needs the ellipse on the RVE axes"))
                        }
                        Some(s) => match s.kind() {
                            ShapeKind::Ellipse { b1, b2 } if b2 > b1 => self.err(
                                "inclusion",
                                format!(
                                    "semi-axis ratio b2/b1 = {} > 1; reorient the axes so that b1 is the major semi-axis (swap b1 and b2)",
                                    b2 / b1
                                ),
                            ),
                            ShapeKind::Ellipse { .. } => {}
                            _ => self.err("inclusion", format!("model {name} needs an elliptical inclusion")),
                        },
                        None => {}
                    }
                }
            }
            _ => {}
        }
    }
}
