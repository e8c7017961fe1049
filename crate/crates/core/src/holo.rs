//! Holomorphic fields on ℂ^m and the class of functions satisfying
//!
//! ```text
//! Σ_{i,j} conj(h_{z_i z_j}) h_{z_i} h_{z_j} = μ(z) h(z),   μ real.
//! ```
//!
//! Real and imaginary parts of such an `h` are orthogonal twin-harmonics on
//! ℝ^{2m}, their zero sets are minimal, and `arg h` is perfectly harmonic.
//!
//! Real charts always order coordinates as `(x₁..x_m, y₁..y_m)` with
//! `z_k = x_k + i y_k`.
//!
//! Sign convention: with `Δu = 0` the Cauchy–Riemann identities give
//! `Δ∞u + iΔ∞v = μh`, hence `Δ₁u = −μu` and `Δ₁v = −μv`. For the Clifford
//! quadric `z₁² + … + z_m²` this means `μ = 8` and `Δ₁(Re h) = −8 Re h`;
//! for `det Z` at `Z = I₂` it means `μ = +2`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::fields::{FieldError, ScalarField, WeightSpec, SINGULAR_MARGIN};
use crate::jets::{CJet2, Jet2};
use crate::operators::{self, scale};
use crate::poly::{Monomial, Polynomial};

/// Floor on `|h|` below which `μ` is not reported.
pub const MU_VALUE_FLOOR: f64 = 1e-12;

type HoloEvaluator = Arc<dyn Fn(&[Complex64]) -> Result<CJet2, FieldError> + Send + Sync>;
type HoloGuard = Arc<dyn Fn(&[Complex64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct HoloField {
    m: usize,
    name: String,
    eval: HoloEvaluator,
    guard: HoloGuard,
}

impl fmt::Debug for HoloField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HoloField").field("name", &self.name).field("m", &self.m).finish()
    }
}

/// Complex point from the real chart `(x₁..x_m, y₁..y_m)`.
pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
    let m = x.len() / 2;
    (0..m).map(|k| Complex64::new(x[k], x[m + k])).collect()
}

/// Real chart of a complex point.
pub fn to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().map(|c| c.re).chain(z.iter().map(|c| c.im)).collect()
}

impl HoloField {
    pub fn new(
        m: usize,
        name: impl Into<String>,
        eval: impl Fn(&[Complex64]) -> Result<CJet2, FieldError> + Send + Sync + 'static,
    ) -> Self {
        Self { m, name: name.into(), eval: Arc::new(eval), guard: Arc::new(|_| false) }
    }

    pub fn with_guard(mut self, guard: impl Fn(&[Complex64]) -> bool + Send + Sync + 'static) -> Self {
        self.guard = Arc::new(guard);
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Complex dimension.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Real dimension `2m`.
    pub fn real_dim(&self) -> usize {
        2 * self.m
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, z: &[Complex64]) -> Result<CJet2, FieldError> {
        if z.len() != self.m {
            return Err(FieldError::DimensionMismatch { expected: self.m, got: z.len() });
        }
        Ok((self.eval)(z)?.check_finite()?)
    }

    pub fn value(&self, z: &[Complex64]) -> Result<Complex64, FieldError> {
        Ok(self.eval(z)?.value())
    }

    /// `true` on the excluded neighbourhood of zeros, poles and branch cuts.
    pub fn is_guarded(&self, z: &[Complex64]) -> bool {
        z.len() != self.m || (self.guard)(z)
    }

    pub fn from_polynomial(p: Polynomial, name: impl Into<String>) -> Self {
        let m = p.n();
        let p = Arc::new(p);
        HoloField::new(m, name, move |z| Ok(p.jet_complex(z)))
    }
}

fn near_cut(w: Complex64) -> bool {
    w.norm() < SINGULAR_MARGIN || (w.re < 0.0 && w.im.abs() < SINGULAR_MARGIN * w.norm())
}

fn is_integer(r: f64) -> bool {
    r.fract() == 0.0
}

/// `a·z + b`.
pub fn holo_linear(a: Vec<Complex64>, b: Complex64) -> Result<HoloField, FieldError> {
    let m = a.len();
    if m == 0 {
        return Err(FieldError::InvalidParameter("linear needs at least one coefficient".into()));
    }
    let name = format!("linear(m={m})");
    Ok(HoloField::new(m, name, move |z| {
        let grad = a.clone();
        let value = b + z.iter().zip(&a).map(|(zi, ai)| zi * ai).sum::<Complex64>();
        Ok(CJet2::from_parts(value, grad, vec![Complex64::new(0.0, 0.0); m * m])?)
    }))
}

/// `z₁² + … + z_m²`.
pub fn holo_clifford(m: usize) -> Result<HoloField, FieldError> {
    if m == 0 {
        return Err(FieldError::InvalidParameter("clifford needs m >= 1".into()));
    }
    let p = Polynomial::from_terms(m, (0..m).map(|k| (Monomial::from_pairs([(k, 2)]), 1.0)));
    Ok(HoloField::from_polynomial(p, format!("clifford(m={m})")))
}

/// `e^{p z}` on ℂ.
pub fn holo_exp(p: f64) -> HoloField {
    HoloField::new(1, format!("exp(p={p})"), move |z| {
        let zj = CJet2::variable(1, 0, z[0])?;
        Ok(zj.scale(Complex64::new(p, 0.0)).exp())
    })
}

/// `(a z + b)^p` on ℂ with the principal branch.
pub fn holo_binomial(a: Complex64, b: Complex64, p: f64) -> Result<HoloField, FieldError> {
    if a.norm() == 0.0 {
        return Err(FieldError::InvalidParameter("binomial needs a != 0".into()));
    }
    let name = format!("binomial(a={},b={},p={p})", fmt_complex(a), fmt_complex(b));
    let f = HoloField::new(1, name, move |z| {
        let w = CJet2::variable(1, 0, z[0])?.scale(a).add_scalar(b);
        Ok(w.powf(p)?)
    });
    Ok(if is_integer(p) && p >= 0.0 {
        f
    } else if is_integer(p) {
        f.with_guard(move |z| (a * z[0] + b).norm() < SINGULAR_MARGIN)
    } else {
        f.with_guard(move |z| near_cut(a * z[0] + b))
    })
}

/// `z₁^{k₁} ⋯ z_m^{k_m}` with integer exponents.
pub fn holo_monomial(exponents: &[i32]) -> Result<HoloField, FieldError> {
    if exponents.is_empty() || exponents.iter().all(|&k| k == 0) {
        return Err(FieldError::InvalidParameter("monomial needs a nonzero exponent".into()));
    }
    let m = exponents.len();
    let ks = exponents.to_vec();
    let guard_ks = ks.clone();
    let name = format!("monomial(k={exponents:?})");
    Ok(HoloField::new(m, name, move |z| {
        let mut acc = CJet2::constant(m, Complex64::new(1.0, 0.0));
        for (i, &k) in ks.iter().enumerate() {
            if k != 0 {
                acc = acc.try_mul(&CJet2::variable(m, i, z[i])?.powi(k)?)?;
            }
        }
        Ok(acc)
    })
    .with_guard(move |z| guard_ks.iter().zip(z).any(|(&k, zi)| k < 0 && zi.norm() < SINGULAR_MARGIN)))
}

/// The Lawson monomial `z₁^p z₂^q`.
pub fn holo_lawson(p: u32, q: u32) -> Result<HoloField, FieldError> {
    let exps = [i32::try_from(p), i32::try_from(q)];
    match exps {
        [Ok(p), Ok(q)] => Ok(holo_monomial(&[p, q])?.renamed(format!("lawson(p={p},q={q})"))),
        _ => Err(FieldError::InvalidParameter("lawson exponents too large".into())),
    }
}

fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter()
        .map(|p| {
            let inversions =
                (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            (p, sign)
        })
        .collect()
}

/// Leibniz expansion of `det Z` for a `k×k` matrix; variable `i·k + j` is `z_{ij}`.
pub fn determinant_polynomial(k: usize) -> Polynomial {
    Polynomial::from_terms(
        k * k,
        permutations(k).into_iter().map(|(p, s)| (Monomial::from_pairs((0..k).map(|i| (i * k + p[i], 1))), s)),
    )
}

/// `det Z` on ℂ^{k²}, `2 ≤ k ≤ 4`.
pub fn holo_det(k: usize) -> Result<HoloField, FieldError> {
    if !(2..=4).contains(&k) {
        return Err(FieldError::InvalidParameter(format!("det needs 2 <= k <= 4, got {k}")));
    }
    Ok(HoloField::from_polynomial(determinant_polynomial(k), format!("det(k={k})")))
}

/// `c·h^r`.
pub fn holo_power(h: &HoloField, c: Complex64, r: f64) -> HoloField {
    let he = h.clone();
    let hg = h.clone();
    let name = format!("power(h={},c={},r={r})", h.name, fmt_complex(c));
    HoloField::new(h.m, name, move |z| Ok(he.eval(z)?.powf(r)?.scale(c))).with_guard(move |z| {
        if hg.is_guarded(z) {
            return true;
        }
        if is_integer(r) && r >= 0.0 {
            return false;
        }
        match hg.value(z) {
            Ok(w) if is_integer(r) => w.norm() < SINGULAR_MARGIN,
            Ok(w) => near_cut(w),
            Err(_) => true,
        }
    })
}

/// `h(z)·g(w)` on the concatenated variables.
pub fn holo_product(h: &HoloField, g: &HoloField) -> HoloField {
    combine(h, g, false)
}

/// `h(z)/g(w)` on the concatenated variables.
pub fn holo_quotient(h: &HoloField, g: &HoloField) -> HoloField {
    combine(h, g, true)
}

fn combine(h: &HoloField, g: &HoloField, quotient: bool) -> HoloField {
    let (m, n) = (h.m, g.m);
    let total = m + n;
    let name = format!("{}(h={},g={})", if quotient { "quotient" } else { "product" }, h.name, g.name);
    let (he, ge) = (h.clone(), g.clone());
    let (hg, gg) = (h.clone(), g.clone());
    HoloField::new(total, name, move |z| {
        let a = he.eval(&z[..m])?.embed(total, 0)?;
        let b = ge.eval(&z[m..])?.embed(total, m)?;
        Ok(if quotient { a.try_div(&b)? } else { a.try_mul(&b)? })
    })
    .with_guard(move |z| {
        hg.is_guarded(&z[..m])
            || gg.is_guarded(&z[m..])
            || (quotient && gg.value(&z[m..]).map_or(true, |w| w.norm() < SINGULAR_MARGIN))
    })
}

fn real_field(h: &HoloField, imag: bool) -> ScalarField {
    let he = h.clone();
    let hg = h.clone();
    let name = format!("{}({})", if imag { "im" } else { "re" }, h.name);
    ScalarField::new(h.real_dim(), name, move |x| {
        let j = he.eval(&to_complex(x))?;
        Ok(if imag { j.imag_part() } else { j.real_part() })
    })
    .with_guard(move |x| x.len() % 2 != 0 || hg.is_guarded(&to_complex(x)))
    .with_weight(WeightSpec::Generic)
}

/// `Re h` on ℝ^{2m}.
pub fn re_field(h: &HoloField) -> ScalarField {
    real_field(h, false)
}

/// `Im h` on ℝ^{2m}.
pub fn im_field(h: &HoloField) -> ScalarField {
    real_field(h, true)
}

/// `arg h = atan2(Im h, Re h)` on ℝ^{2m}; perfectly harmonic when `h` is in the class.
pub fn arg_field(h: &HoloField) -> ScalarField {
    let he = h.clone();
    let hg = h.clone();
    ScalarField::new(h.real_dim(), format!("arg({})", h.name), move |x| {
        let j = he.eval(&to_complex(x))?;
        Ok(Jet2::atan2(&j.imag_part(), &j.real_part())?)
    })
    .with_guard(move |x| {
        let z = to_complex(x);
        x.len() % 2 != 0 || hg.is_guarded(&z) || hg.value(&z).map_or(true, |w| w.norm() < SINGULAR_MARGIN)
    })
    .with_weight(WeightSpec::Zero)
}

/// Minimal-graph residual of `x_{2m+1} = arg h(z)` at the real point `x`.
pub fn arg_graph_residual(h: &HoloField, x: &[f64]) -> Result<f64, FieldError> {
    Ok(operators::graph_residual(&arg_field(h).eval(x)?))
}

/// Membership data for the holomorphic class at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmResidual {
    /// `Σ conj(h_{z_i z_j}) h_{z_i} h_{z_j}`.
    pub r: Complex64,
    /// `Re(r·conj h)/|h|²`, reported only when `|h| > MU_VALUE_FLOOR`.
    pub mu: Option<f64>,
    /// `|Im(r·conj h)| / (|r|·|h| + 1e-300)`.
    pub imag_defect: f64,
    pub value: Complex64,
}

pub fn tm_sum(j: &CJet2) -> Complex64 {
    let m = j.n();
    let g = j.grad();
    let mut r = Complex64::new(0.0, 0.0);
    for i in 0..m {
        for k in 0..m {
            r += j.hess(i, k).conj() * g[i] * g[k];
        }
    }
    r
}

pub fn tm_residual(h: &HoloField, z: &[Complex64]) -> Result<TmResidual, FieldError> {
    let j = h.eval(z)?;
    let r = tm_sum(&j);
    let hv = j.value();
    let prod = r * hv.conj();
    let hn = hv.norm();
    let mu = (hn > MU_VALUE_FLOOR).then(|| prod.re / (hn * hn));
    let imag_defect = prod.im.abs() / (r.norm() * hn + 1e-300);
    Ok(TmResidual { r, mu, imag_defect, value: hv })
}

/// The four orthogonal twin-harmonic residuals at a point, in cross-multiplied form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwinResidual {
    /// `vΔu − uΔv`
    pub r9: f64,
    /// `vΔ∞u − uΔ∞v`
    pub r10: f64,
    /// `|∇u|² − |∇v|²`
    pub r11a: f64,
    /// `∇u·∇v`
    pub r11b: f64,
}

impl TwinResidual {
    pub fn max(&self) -> f64 {
        self.r9.abs().max(self.r10.abs()).max(self.r11a.abs()).max(self.r11b.abs())
    }

    pub fn components(&self) -> [(&'static str, f64); 4] {
        [("r9", self.r9), ("r10", self.r10), ("r11a", self.r11a), ("r11b", self.r11b)]
    }
}

/// Raw and scale-free twin residuals of `(u, v)` at `x`.
pub fn twin_residual(u: &ScalarField, v: &ScalarField, x: &[f64]) -> Result<(TwinResidual, TwinResidual), FieldError> {
    if u.dim() != v.dim() {
        return Err(FieldError::DimensionMismatch { expected: u.dim(), got: v.dim() });
    }
    let (ju, jv) = (u.eval(x)?, v.eval(x)?);
    Ok(twin_residual_jets(&ju, &jv))
}

pub fn twin_residual_jets(ju: &Jet2, jv: &Jet2) -> (TwinResidual, TwinResidual) {
    use operators::{inf_laplacian, laplacian};
    let (uv, vv) = (ju.value(), jv.value());
    let (gu2, gv2) = (ju.grad_norm_sq(), jv.grad_norm_sq());
    let dot: f64 = ju.grad().iter().zip(jv.grad()).map(|(a, b)| a * b).sum();
    let raw = TwinResidual {
        r9: vv * laplacian(ju) - uv * laplacian(jv),
        r10: vv * inf_laplacian(ju) - uv * inf_laplacian(jv),
        r11a: gu2 - gv2,
        r11b: dot,
    };
    let (hu, hv) = (ju.hess_norm(), jv.hess_norm());
    let scaled = TwinResidual {
        r9: raw.r9 / (1.0 + vv.abs() * hu + uv.abs() * hv),
        r10: raw.r10 / (1.0 + vv.abs() * gu2 * hu + uv.abs() * gv2 * hv),
        r11a: raw.r11a / (1.0 + gu2 + gv2),
        r11b: raw.r11b / (1.0 + (gu2 * gv2).sqrt()),
    };
    (raw, scaled)
}

/// `|Δ₁u + μu|` and `|Δ₁v + μv|` for `u + iv = h`, scaled like `Δ₁`.
pub fn eigen_consequence_residual(h: &HoloField, z: &[Complex64]) -> Result<Option<(f64, f64)>, FieldError> {
    let tm = tm_residual(h, z)?;
    let Some(mu) = tm.mu else { return Ok(None) };
    let j = h.eval(z)?;
    let one = |w: Jet2| {
        let res = operators::one_laplacian(&w) + mu * w.value();
        res.abs() / (scale::cubic(&w) + mu.abs() * w.value().abs())
    };
    Ok(Some((one(j.real_part()), one(j.imag_part()))))
}

pub(crate) fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

/// Principal argument distance from the negative real axis, in radians.
pub fn distance_to_cut(w: Complex64) -> f64 {
    PI - w.arg().abs()
}
