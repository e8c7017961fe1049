//! Seeded sampling harness.
//!
//! Points are drawn serially from a ChaCha8 stream seeded by [`SampleConfig::seed`],
//! residuals are evaluated in parallel, and aggregation runs in point order, so a
//! report depends only on (field, check, config).

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{FieldError, ScalarField, WeightSpec};
use crate::holo::{self, HoloField};
use crate::jets::Jet2;
use crate::operators::{self, scale};

pub mod export;

pub use export::{
    export_level_points, parse_point, read_csv_points, read_ply_points, write_points, ExportError, ExportFormat,
    ExportSummary, FormatError,
};

/// Default tolerance for identities that hold exactly under AD.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default tolerance for mean curvature on projected level-set points.
pub const DEFAULT_MINCURV_TOL: f64 = 1e-8;
/// Relative tolerance of Newton projection: `|u − c| ≤ 1e-12·(1 + |x|·|∇u|)`.
pub const PROJECTION_RTOL: f64 = 1e-12;
pub const PROJECTION_MAX_ITER: usize = 60;
/// Largest fraction of failed projections a check tolerates.
pub const MAX_PROJECTION_FAILURE_RATE: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("gave up after {rejected} rejected candidates ({accepted} accepted)")]
    TooManyRejects { accepted: usize, rejected: usize },
    #[error("gradient collapsed during projection: |∇u| = {0:e}")]
    GradientCollapse(f64),
    #[error("projection did not converge in {iterations} iterations (|u − c| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("check '{check}' cannot run on {target}")]
    Incompatible { check: String, target: &'static str },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub count: usize,
    /// Points are uniform in `[−R, R]^N`.
    pub box_radius: f64,
    pub grad_floor: f64,
    pub max_rejects: usize,
    /// Holomorphic checks reject points with `|h|` below this.
    pub value_floor: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self { seed: 0, count: 500, box_radius: 2.0, grad_floor: 1e-8, max_rejects: 1_000_000, value_floor: 0.1 }
    }
}

impl SampleConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn with_box(mut self, r: f64) -> Self {
        self.box_radius = r;
        self
    }
}

/// Accepted points and the number of rejected candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub points: Vec<Vec<f64>>,
    pub rejected: usize,
}

/// Draws `cfg.count` points of ℝ^dim accepted by `accept`.
pub fn sample_with(cfg: &SampleConfig, dim: usize, accept: impl Fn(&[f64]) -> bool) -> Result<Samples, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let r = cfg.box_radius;
    let mut points = Vec::with_capacity(cfg.count);
    let mut rejected = 0;
    while points.len() < cfg.count {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-r..=r)).collect();
        if accept(&x) {
            points.push(x);
        } else {
            rejected += 1;
            if rejected > cfg.max_rejects {
                return Err(VerifyError::TooManyRejects { accepted: points.len(), rejected });
            }
        }
    }
    Ok(Samples { points, rejected })
}

/// Admissible points of a scalar field: off its guard, finite jet, `|∇f|` above the floor.
pub fn sample_points(cfg: &SampleConfig, field: &ScalarField) -> Result<Samples, VerifyError> {
    sample_with(cfg, field.dim(), |x| admissible(field, x, cfg.grad_floor))
}

fn admissible(field: &ScalarField, x: &[f64], grad_floor: f64) -> bool {
    !field.is_guarded(x) && field.eval(x).is_ok_and(|j| j.grad_norm_sq().sqrt() > grad_floor)
}

/// Newton iteration `x ← x − (u(x) − c)∇u/|∇u|²` until `|u − c| ≤ tol`.
/// Returns the point and the number of steps taken.
pub fn newton_project(
    field: &ScalarField,
    x0: &[f64],
    level: f64,
    tol: f64,
    max_iter: usize,
    grad_floor: f64,
) -> Result<(Vec<f64>, usize), VerifyError> {
    let mut x = x0.to_vec();
    for it in 0..=max_iter {
        let j = field.eval(&x)?;
        let r = j.value() - level;
        if r.abs() <= tol {
            return Ok((x, it));
        }
        if it == max_iter {
            return Err(VerifyError::NoConvergence { iterations: it, residual: r.abs() });
        }
        let g2 = j.grad_norm_sq();
        if !(g2.sqrt() > grad_floor) {
            return Err(VerifyError::GradientCollapse(g2.sqrt()));
        }
        for (xi, gi) in x.iter_mut().zip(j.grad()) {
            *xi -= r * gi / g2;
        }
    }
    unreachable!()
}

/// Extra Newton steps taken after convergence while each still halves the residual.
const POLISH_STEPS: usize = 8;

/// [`newton_project`] with the relative tolerance used by the checks, then
/// polished down to the rounding floor of the field.
pub fn project_to_level(field: &ScalarField, x0: &[f64], level: f64, grad_floor: f64) -> Result<Vec<f64>, VerifyError> {
    let j = field.eval(x0)?;
    let xn = x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = PROJECTION_RTOL * (1.0 + xn * j.grad_norm_sq().sqrt() + level.abs());
    let (mut x, _) = newton_project(field, x0, level, tol, PROJECTION_MAX_ITER, grad_floor)?;
    let mut r = (field.value(&x)? - level).abs();
    for _ in 0..POLISH_STEPS {
        if r == 0.0 {
            break;
        }
        let Ok(y) = newton_step(field, &x, level, grad_floor) else { break };
        let ry = match field.value(&y) {
            Ok(v) => (v - level).abs(),
            Err(_) => break,
        };
        if ry > 0.5 * r {
            if ry < r {
                x = y;
            }
            break;
        }
        (x, r) = (y, ry);
    }
    if field.is_guarded(&x) {
        return Err(VerifyError::Field(FieldError::Unsupported("projected into the guarded region".into())));
    }
    Ok(x)
}

fn newton_step(field: &ScalarField, x: &[f64], level: f64, grad_floor: f64) -> Result<Vec<f64>, VerifyError> {
    let j = field.eval(x)?;
    let r = j.value() - level;
    let g2 = j.grad_norm_sq();
    if !(g2.sqrt() > grad_floor) {
        return Err(VerifyError::GradientCollapse(g2.sqrt()));
    }
    Ok(x.iter().zip(j.grad()).map(|(xi, gi)| xi - r * gi / g2).collect())
}

/// Object a check runs on.
#[derive(Debug, Clone)]
pub enum Target {
    Scalar(ScalarField),
    Pair(ScalarField, ScalarField),
    Holo(HoloField),
}

impl Target {
    pub fn name(&self) -> String {
        match self {
            Target::Scalar(f) => f.name().to_string(),
            Target::Pair(u, v) => format!("({}, {})", u.name(), v.name()),
            Target::Holo(h) => h.name().to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Target::Scalar(_) => "a scalar field",
            Target::Pair(..) => "a field pair",
            Target::Holo(_) => "a holomorphic field",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Target::Scalar(f) | Target::Pair(f, _) => f.dim(),
            Target::Holo(h) => h.real_dim(),
        }
    }

    /// Scalar view: holomorphic fields become their real part.
    pub fn scalar(&self) -> Option<ScalarField> {
        match self {
            Target::Scalar(f) => Some(f.clone()),
            Target::Holo(h) => Some(holo::re_field(h)),
            Target::Pair(..) => None,
        }
    }

    /// Pair view: holomorphic fields become `(Re h, Im h)`.
    pub fn pair(&self) -> Option<(ScalarField, ScalarField)> {
        match self {
            Target::Pair(u, v) => Some((u.clone(), v.clone())),
            Target::Holo(h) => Some((holo::re_field(h), holo::im_field(h))),
            Target::Scalar(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// `Δf = 0` and `Δ∞f = 0`.
    Ph,
    /// `Δ₁f = λ|x|²f`, `Δ₁f = 0`, or `Δ₁f = 0` on the zero set; `None` uses the field's own weight.
    Eigen(Option<WeightSpec>),
    /// The four orthogonal twin-harmonic residuals.
    Twin,
    /// Membership of the holomorphic class.
    Tm,
    /// Mean curvature on the level set `f = level`.
    MinCurv { level: f64 },
    /// Minimal-graph equation for `x_{N+1} = f(x)`.
    Graph,
}

impl Check {
    pub fn parse(name: &str, level: f64, lambda: Option<f64>) -> Option<Self> {
        Some(match name.to_ascii_lowercase().as_str() {
            "ph" => Check::Ph,
            "eigen" => Check::Eigen(lambda.map(|lambda| WeightSpec::Radial { lambda })),
            "twin" => Check::Twin,
            "tm" => Check::Tm,
            "mincurv" => Check::MinCurv { level },
            "graph" => Check::Graph,
            _ => return None,
        })
    }

    pub fn default_tol(&self) -> f64 {
        match self {
            Check::MinCurv { .. } => DEFAULT_MINCURV_TOL,
            _ => DEFAULT_TOL,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Ph => write!(f, "ph"),
            Check::Eigen(None) => write!(f, "eigen"),
            Check::Eigen(Some(w)) => write!(f, "eigen({w})"),
            Check::Twin => write!(f, "twin"),
            Check::Tm => write!(f, "tm"),
            Check::MinCurv { level } => write!(f, "mincurv(level={level})"),
            Check::Graph => write!(f, "graph"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub field: String,
    pub check: String,
    pub seed: u64,
    pub n_samples: usize,
    pub n_rejected: usize,
    pub n_projection_failures: usize,
    pub tol: f64,
    #[serde(with = "finite_or_null")]
    pub max_abs_residual: f64,
    #[serde(with = "finite_or_null")]
    pub mean_abs_residual: f64,
    pub worst_point: Vec<f64>,
    pub pass: bool,
    pub reason: Option<String>,
    /// How the residual was made scale-free.
    pub normalization: String,
    /// Largest value of each residual component.
    #[serde(with = "finite_map")]
    pub components: BTreeMap<String, f64>,
    pub runtime_ms: u64,
}

/// Non-finite residuals are written as `null` and read back as `+∞`.
mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

mod finite_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(|(k, v)| (k, v.is_finite().then_some(*v))).collect::<BTreeMap<_, _>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        let m = BTreeMap::<String, Option<f64>>::deserialize(d)?;
        Ok(m.into_iter().map(|(k, v)| (k, v.unwrap_or(f64::INFINITY))).collect())
    }
}

impl VerificationReport {
    /// JSON with `runtime_ms` zeroed, for comparing runs.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.runtime_ms = 0;
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// One point's residual components; the first is the one compared against `tol`
/// unless `main` says otherwise.
struct PointResult {
    main: f64,
    components: Vec<(&'static str, f64)>,
}

type Evaluator = Box<dyn Fn(&[f64]) -> Result<PointResult, FieldError> + Send + Sync>;

struct Plan {
    dim: usize,
    normalization: &'static str,
    accept: Box<dyn Fn(&[f64]) -> bool + Send + Sync>,
    project: Option<(ScalarField, f64)>,
    eval: Evaluator,
}

fn radial_norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn ph_point(j: &Jet2) -> PointResult {
    let (a, b) = operators::ph_residual_scaled(j);
    PointResult { main: a.max(b), components: vec![("laplacian", a), ("inf_laplacian", b)] }
}

fn plan(target: &Target, check: &Check, cfg: &SampleConfig) -> Result<Plan, VerifyError> {
    let incompatible = || VerifyError::Incompatible { check: check.to_string(), target: target.kind() };
    let floor = cfg.grad_floor;
    let scalar_accept = |f: &ScalarField| {
        let f = f.clone();
        Box::new(move |x: &[f64]| admissible(&f, x, floor)) as Box<dyn Fn(&[f64]) -> bool + Send + Sync>
    };
    Ok(match check {
        Check::Ph => {
            let f = target.scalar().ok_or_else(incompatible)?;
            let fe = f.clone();
            Plan {
                dim: f.dim(),
                normalization: "|Δf|/(1+‖Hess f‖_F), |Δ∞f|/(1+|∇f|²‖Hess f‖_F)",
                accept: scalar_accept(&f),
                project: None,
                eval: Box::new(move |x| Ok(ph_point(&fe.eval(x)?))),
            }
        }
        Check::Graph => {
            let f = target.scalar().ok_or_else(incompatible)?;
            let fe = f.clone();
            Plan {
                dim: f.dim(),
                normalization: "|(1+|∇z|²)Δz − Δ∞z|/(1+(1+2|∇z|²)‖Hess z‖_F)",
                accept: Box::new(move |x| !f.is_guarded(x) && f.eval(x).is_ok()),
                project: None,
                eval: Box::new(move |x| {
                    let j = fe.eval(x)?;
                    let r = operators::graph_residual(&j).abs() / scale::graph(&j);
                    Ok(PointResult { main: r, components: vec![("graph", r)] })
                }),
            }
        }
        Check::Eigen(weight) => {
            let f = target.scalar().ok_or_else(incompatible)?;
            let w = weight.or(f.weight()).unwrap_or(WeightSpec::Generic);
            let fe = f.clone();
            match w {
                WeightSpec::Radial { lambda } => Plan {
                    dim: f.dim(),
                    normalization: "|Δ₁f − λ|x|²f|/(1+|∇f|²‖Hess f‖_F+|λ||x|²|f|)",
                    accept: scalar_accept(&f),
                    project: None,
                    eval: Box::new(move |x| {
                        let j = fe.eval(x)?;
                        let target = lambda * radial_norm_sq(x) * j.value();
                        let r = (operators::one_laplacian(&j) - target).abs() / (scale::cubic(&j) + target.abs());
                        let lap = operators::laplacian(&j).abs() / scale::laplacian(&j);
                        Ok(PointResult { main: r, components: vec![("eigen", r), ("laplacian", lap)] })
                    }),
                },
                WeightSpec::Zero => Plan {
                    dim: f.dim(),
                    normalization: "|Δ₁f|/(1+|∇f|²‖Hess f‖_F)",
                    accept: scalar_accept(&f),
                    project: None,
                    eval: Box::new(move |x| {
                        let j = fe.eval(x)?;
                        let r = operators::one_laplacian(&j).abs() / scale::cubic(&j);
                        Ok(PointResult { main: r, components: vec![("eigen", r)] })
                    }),
                },
                WeightSpec::Generic => Plan {
                    dim: f.dim(),
                    normalization: "|Δ₁f|/(1+|∇f|²‖Hess f‖_F) on projected points of f = 0",
                    accept: scalar_accept(&f),
                    project: Some((f.clone(), 0.0)),
                    eval: Box::new(move |x| {
                        let j = fe.eval(x)?;
                        let r = operators::one_laplacian(&j).abs() / scale::cubic(&j);
                        Ok(PointResult { main: r, components: vec![("eigen", r)] })
                    }),
                },
            }
        }
        Check::MinCurv { level } => {
            let f = target.scalar().ok_or_else(incompatible)?;
            let fe = f.clone();
            Plan {
                dim: f.dim(),
                normalization: "|H| = |Δ₁f|/|∇f|³ (absolute) on projected points",
                accept: scalar_accept(&f),
                project: Some((f.clone(), *level)),
                eval: Box::new(move |x| {
                    let j = fe.eval(x)?;
                    let h = operators::mean_curvature(&j, floor)
                        .map_err(|e| FieldError::Unsupported(e.to_string()))?
                        .abs();
                    Ok(PointResult { main: h, components: vec![("mean_curvature", h)] })
                }),
            }
        }
        Check::Twin => {
            let (u, v) = target.pair().ok_or_else(incompatible)?;
            if u.dim() != v.dim() {
                return Err(FieldError::DimensionMismatch { expected: u.dim(), got: v.dim() }.into());
            }
            let (ua, va) = (u.clone(), v.clone());
            Plan {
                dim: u.dim(),
                normalization: "r9/(1+|v|‖Hu‖+|u|‖Hv‖), r10/(1+|v||∇u|²‖Hu‖+|u||∇v|²‖Hv‖), r11a/(1+|∇u|²+|∇v|²), r11b/(1+|∇u||∇v|)",
                accept: Box::new(move |x| {
                    !ua.is_guarded(x) && !va.is_guarded(x) && ua.eval(x).is_ok() && va.eval(x).is_ok()
                }),
                project: None,
                eval: Box::new(move |x| {
                    let (_, s) = holo::twin_residual(&u, &v, x)?;
                    let c = s.components().map(|(k, r)| (k, r.abs()));
                    Ok(PointResult { main: s.max(), components: c.to_vec() })
                }),
            }
        }
        Check::Tm => {
            let Target::Holo(h) = target else { return Err(incompatible()) };
            let (ha, he) = (h.clone(), h.clone());
            let value_floor = cfg.value_floor;
            Plan {
                dim: h.real_dim(),
                normalization: "|Im(r·conj h)|/(|r||h|+1e-300), r = Σ conj(h_ij) h_i h_j",
                accept: Box::new(move |x| {
                    let z = holo::to_complex(x);
                    !ha.is_guarded(&z) && ha.value(&z).is_ok_and(|w| w.norm() >= value_floor)
                }),
                project: None,
                eval: Box::new(move |x| {
                    let t = holo::tm_residual(&he, &holo::to_complex(x))?;
                    Ok(PointResult { main: t.imag_defect, components: vec![("imag_defect", t.imag_defect)] })
                }),
            }
        }
    })
}

fn failed_report(target: &Target, check: &Check, cfg: &SampleConfig, tol: f64, reason: String) -> VerificationReport {
    VerificationReport {
        field: target.name(),
        check: check.to_string(),
        seed: cfg.seed,
        n_samples: 0,
        n_rejected: 0,
        n_projection_failures: 0,
        tol,
        max_abs_residual: f64::INFINITY,
        mean_abs_residual: f64::INFINITY,
        worst_point: Vec::new(),
        pass: false,
        reason: Some(reason),
        normalization: String::new(),
        components: BTreeMap::new(),
        runtime_ms: 0,
    }
}

/// Runs `check` on `target` at `cfg.count` seeded points.
///
/// Fails (rather than erroring) when sampling gives up, no point is
/// evaluated, more than 10% of projections fail, or any residual is
/// non-finite or above `tol`.
pub fn run_check(target: &Target, check: &Check, cfg: &SampleConfig, tol: f64) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let plan = plan(target, check, cfg)?;
    if cfg.count == 0 {
        let mut r = failed_report(target, check, cfg, tol, "no samples requested".into());
        r.normalization = plan.normalization.into();
        return Ok(r);
    }
    let samples = match sample_with(cfg, plan.dim, &plan.accept) {
        Ok(s) => s,
        Err(e @ VerifyError::TooManyRejects { .. }) => {
            let mut r = failed_report(target, check, cfg, tol, e.to_string());
            r.normalization = plan.normalization.into();
            return Ok(r);
        }
        Err(e) => return Err(e),
    };
    let results: Vec<Option<(Vec<f64>, Result<PointResult, FieldError>)>> = samples
        .points
        .par_iter()
        .map(|x0| {
            let x = match &plan.project {
                Some((f, level)) => project_to_level(f, x0, *level, cfg.grad_floor).ok()?,
                None => x0.clone(),
            };
            let r = (plan.eval)(&x);
            Some((x, r))
        })
        .collect();

    let mut n_fail_proj = 0;
    let mut n_eval_errors = 0;
    let mut n = 0;
    let mut max = 0.0f64;
    let mut sum = 0.0;
    let mut worst = Vec::new();
    let mut components: BTreeMap<String, f64> = BTreeMap::new();
    let mut first_error = None;
    for item in results {
        let Some((x, r)) = item else {
            n_fail_proj += 1;
            continue;
        };
        let r = match r {
            Ok(r) => r,
            Err(e) => {
                n_eval_errors += 1;
                first_error.get_or_insert_with(|| e.to_string());
                continue;
            }
        };
        n += 1;
        let v = if r.main.is_finite() { r.main.abs() } else { f64::INFINITY };
        if v > max || worst.is_empty() {
            max = max.max(v);
            worst = x;
        }
        sum += v;
        for (k, c) in r.components {
            let c = if c.is_finite() { c.abs() } else { f64::INFINITY };
            let e = components.entry(k.to_string()).or_insert(0.0);
            *e = e.max(c);
        }
    }
    let projected = plan.project.is_some();
    let fail_rate = n_fail_proj as f64 / samples.points.len() as f64;
    let mut reason = None;
    if n == 0 {
        reason = Some("no point could be evaluated".to_string());
    } else if projected && fail_rate > MAX_PROJECTION_FAILURE_RATE {
        reason = Some(format!("{n_fail_proj} of {} projections failed", samples.points.len()));
    } else if n_eval_errors > 0 {
        reason = Some(format!("{n_eval_errors} evaluation errors, first: {}", first_error.unwrap_or_default()));
    } else if !(max <= tol) {
        reason = Some(format!("max residual {max:e} exceeds tol {tol:e}"));
    }
    Ok(VerificationReport {
        field: target.name(),
        check: check.to_string(),
        seed: cfg.seed,
        n_samples: n,
        n_rejected: samples.rejected,
        n_projection_failures: n_fail_proj,
        tol,
        max_abs_residual: max,
        mean_abs_residual: if n > 0 { sum / n as f64 } else { f64::INFINITY },
        worst_point: worst,
        pass: reason.is_none(),
        reason,
        normalization: plan.normalization.into(),
        components,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{affine, helicoid, polar_angle};
    use crate::holo::{holo_det, holo_linear};
    use crate::jordan::hsiang_field;
    use num_complex::Complex64;

    fn quad(n: usize) -> ScalarField {
        crate::expr::parse_field("x1^2 + x2^2", Some(n)).unwrap()
    }

    #[test]
    fn sampling_is_deterministic_and_guarded() {
        let f = polar_angle(2, 0, 1, 0.0, 1.0).unwrap();
        let cfg = SampleConfig::default().with_seed(42).with_count(200);
        let a = sample_points(&cfg, &f).unwrap();
        let b = sample_points(&cfg, &f).unwrap();
        assert_eq!(a, b);
        assert!(a.points.iter().all(|x| x[0].hypot(x[1]) >= crate::fields::SINGULAR_MARGIN));
        let c = sample_points(&cfg.with_seed(43), &f).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn too_thin_domain() {
        let f = crate::expr::parse_field("sqrt(x1 - 1.99)", None).unwrap();
        let cfg = SampleConfig { max_rejects: 100, ..SampleConfig::default() };
        assert!(matches!(sample_points(&cfg, &f), Err(VerifyError::TooManyRejects { .. })));
    }

    #[test]
    fn newton_examples() {
        let (x, _) = newton_project(&quad(2), &[2.0, 0.0], 1.0, 1e-12, 50, 1e-8).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && x[1] == 0.0);
        let (x, it) = newton_project(&quad(2), &[0.6, 0.8], 1.0, 1e-12, 50, 1e-8).unwrap();
        assert_eq!((x, it), (vec![0.6, 0.8], 0));
        let lin = affine(2, 0.0, vec![1.0, 0.0]).unwrap();
        let (x, it) = newton_project(&lin, &[5.0, 3.0], 0.0, 1e-12, 50, 1e-8).unwrap();
        assert_eq!((x, it), (vec![0.0, 3.0], 1));
        assert!(matches!(
            newton_project(&quad(2), &[0.0, 0.0], 1.0, 1e-12, 50, 1e-8),
            Err(VerifyError::GradientCollapse(_))
        ));
    }

    #[test]
    fn zero_count_fails_with_reason() {
        let r = run_check(&Target::Scalar(helicoid()), &Check::Ph, &SampleConfig::default().with_count(0), 1e-9)
            .unwrap();
        assert_eq!(r.n_samples, 0);
        assert!(!r.pass);
        assert!(r.reason.is_some());
    }

    #[test]
    fn helicoid_ph_passes() {
        let cfg = SampleConfig::default().with_count(1000);
        let r = run_check(&Target::Scalar(helicoid()), &Check::Ph, &cfg, 1e-9).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.n_samples, 1000);
    }

    #[test]
    fn hsiang_eigen_passes_and_wrong_lambda_fails() {
        let f = Target::Scalar(hsiang_field(1).unwrap());
        let cfg = SampleConfig::default();
        assert!(run_check(&f, &Check::Eigen(None), &cfg, 1e-9).unwrap().pass);
        let wrong = Check::Eigen(Some(WeightSpec::Radial { lambda: -1.0 }));
        assert!(!run_check(&f, &wrong, &cfg, 1e-9).unwrap().pass);
    }

    #[test]
    fn cylinder_has_unit_curvature() {
        let r = run_check(
            &Target::Scalar(quad(3)),
            &Check::MinCurv { level: 1.0 },
            &SampleConfig::default().with_count(100),
            1e-8,
        )
        .unwrap();
        assert!(!r.pass);
        assert!((r.max_abs_residual - 1.0).abs() < 1e-9, "{}", r.max_abs_residual);
        assert_eq!(r.n_projection_failures, 0);
    }

    #[test]
    fn negative_controls() {
        let cfg = SampleConfig::default().with_count(100);
        let sq = crate::expr::parse_field("x1^2", None).unwrap();
        assert!(!run_check(&Target::Scalar(sq), &Check::Ph, &cfg, 1e-9).unwrap().pass);
        let u = crate::expr::parse_field("x1", Some(2)).unwrap();
        let v = crate::expr::parse_field("x1 + x2", None).unwrap();
        let r = run_check(&Target::Pair(u, v), &Check::Twin, &cfg, 1e-9).unwrap();
        assert!(!r.pass);
        assert!(r.components["r11b"] > 1e-3);
    }

    #[test]
    fn tm_needs_holo() {
        let cfg = SampleConfig::default().with_count(10);
        assert!(matches!(
            run_check(&Target::Scalar(helicoid()), &Check::Tm, &cfg, 1e-9),
            Err(VerifyError::Incompatible { .. })
        ));
        let det = Target::Holo(holo_det(3).unwrap());
        assert!(run_check(&det, &Check::Tm, &cfg.with_count(200), 1e-9).unwrap().pass);
        let lin = Target::Holo(holo_linear(vec![Complex64::new(1.0, 0.0)], Complex64::new(0.0, 0.0)).unwrap());
        assert!(run_check(&lin, &Check::Twin, &cfg, 1e-9).unwrap().pass);
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = SampleConfig::default().with_seed(9).with_count(300);
        let t = Target::Scalar(hsiang_field(2).unwrap());
        let a = run_check(&t, &Check::MinCurv { level: 0.0 }, &cfg, 1e-8).unwrap();
        let b = run_check(&t, &Check::MinCurv { level: 0.0 }, &cfg, 1e-8).unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
        let back = VerificationReport::from_json(&a.to_json()).unwrap();
        assert_eq!(back.canonical_json(), a.canonical_json());
    }
}
