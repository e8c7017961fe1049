//! Real scalar fields and the combinators that build new minimal-surface
//! candidates out of old ones.
//!
//! A [`ScalarField`] is an immutable, cheaply clonable handle around a pure
//! point-to-[`Jet2`] evaluator, a domain guard marking points that sampling
//! must avoid, and an optional [`WeightSpec`] recording which eigenrelation
//! the field is expected to satisfy.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jets::{Jet2, JetError};
use crate::operators;

/// Distance from a singular locus (axis of a polar angle, zero of a
/// denominator) inside which sampling refuses a point.
pub const SINGULAR_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("point has {got} coordinates, field dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// The eigenrelation a field is expected to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    /// `Δ₁f = 0`.
    Zero,
    /// `Δ₁f = λ|x|²f`.
    Radial { lambda: f64 },
    /// `Δ₁f ≡ 0 mod f`, only testable on the zero set.
    Generic,
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::Zero => write!(f, "zero"),
            WeightSpec::Radial { lambda } => write!(f, "radial({lambda})"),
            WeightSpec::Generic => write!(f, "generic"),
        }
    }
}

type Evaluator = Arc<dyn Fn(&[f64]) -> Result<Jet2, FieldError> + Send + Sync>;
type Guard = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    name: String,
    eval: Evaluator,
    guard: Guard,
    weight: Option<WeightSpec>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("weight", &self.weight)
            .finish()
    }
}

impl ScalarField {
    pub fn new(
        dim: usize,
        name: impl Into<String>,
        eval: impl Fn(&[f64]) -> Result<Jet2, FieldError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            name: name.into(),
            eval: Arc::new(eval),
            guard: Arc::new(|_| false),
            weight: None,
        }
    }

    /// Marks points where `guard` returns `true` as outside the sampling domain.
    pub fn with_guard(mut self, guard: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.guard = Arc::new(guard);
        self
    }

    pub fn with_weight(mut self, weight: WeightSpec) -> Self {
        self.weight = Some(weight);
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn weight(&self) -> Option<WeightSpec> {
        self.weight
    }

    pub fn eval(&self, x: &[f64]) -> Result<Jet2, FieldError> {
        if x.len() != self.dim {
            return Err(FieldError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let j = (self.eval)(x)?;
        debug_assert_eq!(j.n(), self.dim);
        Ok(j.check_finite()?)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64, FieldError> {
        Ok(self.eval(x)?.value())
    }

    /// `true` when `x` lies in the excluded neighbourhood of a singular locus.
    pub fn is_guarded(&self, x: &[f64]) -> bool {
        x.len() != self.dim || (self.guard)(x)
    }
}

fn vars(x: &[f64]) -> Vec<Jet2> {
    Jet2::variables(x)
}

/// `a + b·x`.
pub fn affine(n: usize, a: f64, b: Vec<f64>) -> Result<ScalarField, FieldError> {
    if b.len() != n || n == 0 {
        return Err(FieldError::InvalidParameter(format!(
            "affine needs {n} > 0 coefficients, got {}",
            b.len()
        )));
    }
    let name = format!("affine(a={a},b={b:?})");
    Ok(ScalarField::new(n, name, move |x| {
        let grad = b.clone();
        let value = a + x.iter().zip(&b).map(|(xi, bi)| xi * bi).sum::<f64>();
        Ok(Jet2::from_parts(value, grad, vec![0.0; n * n])?)
    })
    .with_weight(WeightSpec::Zero))
}

/// `a + b·atan2(x_j, x_i)` embedded in ℝⁿ.
pub fn polar_angle(n: usize, i: usize, j: usize, a: f64, b: f64) -> Result<ScalarField, FieldError> {
    if i == j || i >= n || j >= n {
        return Err(FieldError::InvalidParameter(format!(
            "polar angle needs distinct indices below {n}, got {i} and {j}"
        )));
    }
    let name = format!("polar-angle(a={a},b={b})");
    Ok(ScalarField::new(n, name, move |x| {
        let v = vars(x);
        Ok(Jet2::atan2(&v[j], &v[i])?.scale(b).add_scalar(a))
    })
    .with_guard(move |x| x[i].hypot(x[j]) < SINGULAR_MARGIN)
    .with_weight(WeightSpec::Zero))
}

/// `α f(x) + β g(y)` on the concatenated variables `(x, y)`.
pub fn superpose(alpha: f64, f: &ScalarField, beta: f64, g: &ScalarField) -> ScalarField {
    let (nf, ng) = (f.dim, g.dim);
    let total = nf + ng;
    let name = format!("superpose(a={alpha},f={},b={beta},g={})", f.name, g.name);
    let (fe, ge) = (f.clone(), g.clone());
    let (fg, gg) = (f.clone(), g.clone());
    let weight = match (f.weight, g.weight) {
        (Some(WeightSpec::Zero), Some(WeightSpec::Zero)) => Some(WeightSpec::Zero),
        _ => None,
    };
    let field = ScalarField::new(total, name, move |x| {
        let a = fe.eval(&x[..nf])?.scale(alpha).embed(total, 0)?;
        let b = ge.eval(&x[nf..])?.scale(beta).embed(total, nf)?;
        Ok(a.try_add(&b)?)
    })
    .with_guard(move |x| fg.is_guarded(&x[..nf]) || gg.is_guarded(&x[nf..]));
    match weight {
        Some(w) => field.with_weight(w),
        None => field,
    }
}

/// Reorders coordinates: coordinate `k` of the new field feeds coordinate
/// `perm[k]` of `f`.
pub fn permute(f: &ScalarField, perm: Vec<usize>) -> Result<ScalarField, FieldError> {
    let n = f.dim;
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(FieldError::InvalidParameter(format!("{perm:?} is not a permutation of 0..{n}")));
    }
    // inverse: coordinate p of f is coordinate inv[p] of the new field
    let mut inv = vec![0; n];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    let pull = move |x: &[f64]| -> Vec<f64> { inv.iter().map(|&k| x[k]).collect() };
    let pull2 = pull.clone();
    let (fe, fg) = (f.clone(), f.clone());
    let field = ScalarField::new(n, format!("permute({})", f.name), move |x| {
        let j = fe.eval(&pull(x))?;
        Ok(j.permute(&perm)?)
    })
    .with_guard(move |x| fg.is_guarded(&pull2(x)));
    Ok(match f.weight {
        Some(w) => field.with_weight(w),
        None => field,
    })
}

/// The classical helicoid field `x₃ − atan2(x₂, x₁)`.
pub fn helicoid() -> ScalarField {
    let polar = polar_angle(2, 0, 1, 0.0, 1.0).expect("valid indices");
    let lift = affine(1, 0.0, vec![1.0]).expect("valid affine");
    superpose(-1.0, &polar, 1.0, &lift).renamed("helicoid")
}

/// `Σ pₖ atan2(y_k, x_k)` on ℝ^{2m} in the chart `(x₁..x_m, y₁..y_m)`.
pub fn atan_sum(p: &[f64]) -> Result<ScalarField, FieldError> {
    let m = p.len();
    if m == 0 {
        return Err(FieldError::InvalidParameter("atan-sum needs at least one weight".into()));
    }
    let mut acc = polar_angle(2, 0, 1, 0.0, p[0])?;
    for &pk in &p[1..] {
        acc = superpose(1.0, &acc, 1.0, &polar_angle(2, 0, 1, 0.0, pk)?);
    }
    // acc lives on (x₁,y₁,x₂,y₂,...); new coordinate k is x_{k+1} or y_{k-m+1}
    let perm = (0..2 * m).map(|k| if k < m { 2 * k } else { 2 * (k - m) + 1 }).collect();
    Ok(permute(&acc, perm)?.renamed(format!("atan-sum(p={p:?})")))
}

/// `F(x, s, t) = f(x) − atan2(t, s)`, whose zero set is `t = s·tan f(x)`.
pub fn graph_lift_tan(f: &ScalarField) -> ScalarField {
    let polar = polar_angle(2, 0, 1, 0.0, 1.0).expect("valid indices");
    superpose(1.0, f, -1.0, &polar).renamed(format!("graph-lift({})", f.name))
}

/// Smooth maps with `φ(0) = 0` accepted by [`compose_scalar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi {
    Identity,
    Sin,
    Tan,
    Atan,
    /// `t ↦ t^k` for odd `k`.
    OddPower(u32),
    /// `t ↦ e^t − 1`.
    ExpM1,
}

impl Phi {
    pub fn parse(name: &str) -> Result<Self, FieldError> {
        let lower = name.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "id" | "identity" => Phi::Identity,
            "sin" => Phi::Sin,
            "tan" => Phi::Tan,
            "atan" => Phi::Atan,
            "expm1" => Phi::ExpM1,
            other => match other.strip_prefix("pow").and_then(|k| k.parse::<u32>().ok()) {
                Some(k) => Phi::odd_power(k)?,
                None => return Err(FieldError::Unsupported(format!("phi '{name}'"))),
            },
        })
    }

    pub fn odd_power(k: u32) -> Result<Self, FieldError> {
        if k % 2 == 1 {
            Ok(Phi::OddPower(k))
        } else {
            Err(FieldError::Unsupported(format!("even power {k} (phi must be odd)")))
        }
    }

    pub fn name(&self) -> String {
        match self {
            Phi::Identity => "id".into(),
            Phi::Sin => "sin".into(),
            Phi::Tan => "tan".into(),
            Phi::Atan => "atan".into(),
            Phi::OddPower(k) => format!("pow{k}"),
            Phi::ExpM1 => "expm1".into(),
        }
    }

    /// `(φ(t), φ'(t), φ''(t))`.
    pub fn derivatives(&self, t: f64) -> (f64, f64, f64) {
        match *self {
            Phi::Identity => (t, 1.0, 0.0),
            Phi::Sin => (t.sin(), t.cos(), -t.sin()),
            Phi::Tan => {
                let tt = t.tan();
                let s = 1.0 + tt * tt;
                (tt, s, 2.0 * tt * s)
            }
            Phi::Atan => {
                let d = 1.0 / (1.0 + t * t);
                (t.atan(), d, -2.0 * t * d * d)
            }
            Phi::OddPower(k) => {
                let kf = f64::from(k);
                let p2 = if k >= 2 { t.powi(k as i32 - 2) } else { 0.0 };
                (t.powi(k as i32), kf * t.powi(k as i32 - 1), kf * (kf - 1.0) * p2)
            }
            Phi::ExpM1 => (t.exp_m1(), t.exp(), t.exp()),
        }
    }

    fn apply(&self, j: &Jet2) -> Result<Jet2, FieldError> {
        Ok(match *self {
            Phi::Identity => j.clone(),
            Phi::Sin => j.sin(),
            Phi::Tan => j.tan()?,
            Phi::Atan => j.atan(),
            Phi::OddPower(k) => j.powi(k as i32)?,
            Phi::ExpM1 => j.exp_m1(),
        })
    }
}

/// `φ ∘ u`; the zero set of `u` is preserved.
pub fn compose_scalar(phi: Phi, u: &ScalarField) -> ScalarField {
    let (ue, ug) = (u.clone(), u.clone());
    let field = ScalarField::new(u.dim, format!("compose(phi={},u={})", phi.name(), u.name), move |x| {
        phi.apply(&ue.eval(x)?)
    });
    let field = if phi == Phi::Tan {
        let uc = u.clone();
        field.with_guard(move |x| {
            ug.is_guarded(x)
                || uc.value(x).map_or(true, |t| t.cos().abs() < SINGULAR_MARGIN)
        })
    } else {
        field.with_guard(move |x| ug.is_guarded(x))
    };
    match u.weight {
        Some(WeightSpec::Zero) => field.with_weight(WeightSpec::Zero),
        Some(_) => field.with_weight(WeightSpec::Generic),
        None => field,
    }
}

/// Pointwise product `u·v`.
pub fn multiply(v: &ScalarField, u: &ScalarField) -> Result<ScalarField, FieldError> {
    if u.dim != v.dim {
        return Err(FieldError::DimensionMismatch { expected: u.dim, got: v.dim });
    }
    let (ue, ve) = (u.clone(), v.clone());
    let (ug, vg) = (u.clone(), v.clone());
    let field = ScalarField::new(u.dim, format!("multiply(v={},u={})", v.name, u.name), move |x| {
        Ok(ue.eval(x)?.try_mul(&ve.eval(x)?)?)
    })
    .with_guard(move |x| {
        ug.is_guarded(x) || vg.is_guarded(x) || vg.value(x).map_or(true, |t| t.abs() < SINGULAR_MARGIN)
    });
    Ok(match u.weight {
        Some(_) => field.with_weight(WeightSpec::Generic),
        None => field,
    })
}

/// `atan2(v, u)`: perfectly harmonic whenever `(u, v)` are orthogonal twin-harmonics.
pub fn twin_arctan(u: &ScalarField, v: &ScalarField) -> Result<ScalarField, FieldError> {
    if u.dim != v.dim {
        return Err(FieldError::DimensionMismatch { expected: u.dim, got: v.dim });
    }
    let (ue, ve) = (u.clone(), v.clone());
    let (ug, vg) = (u.clone(), v.clone());
    Ok(ScalarField::new(u.dim, format!("twin-arctan({},{})", u.name, v.name), move |x| {
        Ok(Jet2::atan2(&ve.eval(x)?, &ue.eval(x)?)?)
    })
    .with_guard(move |x| {
        if ug.is_guarded(x) || vg.is_guarded(x) {
            return true;
        }
        match (ug.value(x), vg.value(x)) {
            (Ok(a), Ok(b)) => a.hypot(b) < SINGULAR_MARGIN,
            _ => true,
        }
    })
    .with_weight(WeightSpec::Zero))
}

/// `|Δ₁(φ∘u) − φ'(u)³Δ₁u|`, scaled by the magnitudes of the terms that cancel.
pub fn chain_law_residual(phi: Phi, u: &ScalarField, x: &[f64]) -> Result<f64, FieldError> {
    let ju = u.eval(x)?;
    let jc = compose_scalar(phi, u).eval(x)?;
    let (_, d1, d2) = phi.derivatives(ju.value());
    let lhs = operators::one_laplacian(&jc);
    let rhs = d1.powi(3) * operators::one_laplacian(&ju);
    let g2 = ju.grad_norm_sq();
    let scale = 1.0 + d1.abs().powi(3) * g2 * ju.hess_norm() + d1 * d1 * d2.abs() * g2 * g2;
    Ok((lhs - rhs).abs() / scale)
}

/// `|Δ₁(uv) − v³Δ₁u| / (1 + |v|³|Δ₁u|)`; vanishes on the zero set of `u`.
pub fn mod_u_product_residual(u: &ScalarField, v: &ScalarField, x: &[f64]) -> Result<f64, FieldError> {
    let ju = u.eval(x)?;
    let vv = v.value(x)?;
    let juv = multiply(v, u)?.eval(x)?;
    let d1u = operators::one_laplacian(&ju);
    let lhs = operators::one_laplacian(&juv);
    let rhs = vv.powi(3) * d1u;
    Ok((lhs - rhs).abs() / (1.0 + vv.abs().powi(3) * d1u.abs()))
}
