//! Symbolic expansion of the Hsiang cubics `f_d = ⅙ tr x_v³` on the traceless
//! part of `h₄(F_d)`, and the fields built from them.
//!
//! Two charts are used:
//!
//! - the raw chart `(v₁, v₂, v₃, z₁, …, z₆)` of [`traceless_embed`], in which
//!   `b(x, x) = 2|coords|²`. [`hsiang_cubic`] lives here; for `d = 1` it is the
//!   printed `f₁ = √2v₁v₂v₃ + (1/√2)((z₁² − z₂²)v₁ + …) + z₂z₄z₆ + …`.
//! - the `b`-orthonormal chart `ξ = √2·(v, z)`. Since the cubic is homogeneous,
//!   `f(ξ) = f_raw(ξ/√2) = f_raw(ξ)/(2√2)`. [`hsiang_field`] lives here and
//!   satisfies `Δ₁f = −½|ξ|²f`. In the raw chart the same identity reads
//!   `Δ₁f_raw = −4|x|²f_raw`.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use super::division::{check_dimension, qmul, qmul_re};
use super::element::{
    bilinear_b, chart_dim, chart_index, embed_coords, jordan_mul, JordanElement, OFF_SLOTS,
};
use super::JordanError;
use crate::fields::{ScalarField, WeightSpec};
use crate::holo::HoloField;
use crate::poly::{Monomial, Polynomial};

/// Coefficients at or below this magnitude are dropped after expansion.
pub const CLEANUP_THRESHOLD: f64 = 1e-14;

/// Homogeneous cubic polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCubic(Polynomial);

impl SparseCubic {
    pub fn new(p: Polynomial) -> Result<Self, JordanError> {
        if !p.is_homogeneous(3) {
            return Err(JordanError::NotCubic);
        }
        if p.terms().any(|(_, c)| !c.is_finite()) {
            return Err(JordanError::NotCubic);
        }
        Ok(Self(p))
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.0.terms()
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.0
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0.eval(x)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.scaled(c))
    }
}

type PolyQuat = [Polynomial; 4];

fn symbolic_element(d: usize) -> [[PolyQuat; 4]; 4] {
    let n = chart_dim(d);
    let zero = || Polynomial::zero(n);
    let quat_zero = || std::array::from_fn::<Polynomial, 4, _>(|_| zero());
    let mut m: [[PolyQuat; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| quat_zero()));
    let s = 1.0 / SQRT_2;
    let signs = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    for (i, row) in signs.iter().enumerate() {
        m[i][i][0] = Polynomial::from_terms(n, (0..3).map(|k| (Monomial::var(k), s * row[k])));
    }
    for (j, &(p, q)) in OFF_SLOTS.iter().enumerate() {
        for c in 0..d {
            let v = Polynomial::var(n, chart_index(d, j, c));
            let conj = if c == 0 { v.clone() } else { -&v };
            m[p][q][c] = v;
            m[q][p][c] = conj;
        }
    }
    m
}

/// `⅙ Re tr x_v³` expanded in the raw chart.
pub fn hsiang_cubic(d: usize) -> Result<SparseCubic, JordanError> {
    check_dimension(d)?;
    let n = chart_dim(d);
    let x = symbolic_element(d);
    let mut x2: Vec<Vec<PolyQuat>> = Vec::with_capacity(4);
    for i in 0..4 {
        let mut row = Vec::with_capacity(4);
        for k in 0..4 {
            let mut acc: PolyQuat = std::array::from_fn(|_| Polynomial::zero(n));
            for j in 0..4 {
                let p = qmul(&x[i][j], &x[j][k]);
                for c in 0..4 {
                    acc[c] = &acc[c] + &p[c];
                }
            }
            row.push(acc);
        }
        x2.push(row);
    }
    let mut trace = Polynomial::zero(n);
    for i in 0..4 {
        for k in 0..4 {
            trace = &trace + &qmul_re(&x2[i][k], &x[k][i]);
        }
    }
    SparseCubic::new(trace.scaled(1.0 / 6.0).cleaned(CLEANUP_THRESHOLD))
}

/// Expected term count `1 + 6d + 4d²`.
pub fn hsiang_term_count(d: usize) -> usize {
    1 + 6 * d + 4 * d * d
}

/// The raw-chart cubic as a real field (`Δ₁f = −4|x|²f`).
pub fn hsiang_raw_field(d: usize) -> Result<ScalarField, JordanError> {
    let cubic = hsiang_cubic(d)?;
    Ok(poly_field(cubic.0, format!("hsiang-raw(d={d})"), WeightSpec::Radial { lambda: -4.0 }))
}

/// The Hsiang eigencubic in `b`-orthonormal coordinates (`Δ₁f = −½|x|²f`).
pub fn hsiang_field(d: usize) -> Result<ScalarField, JordanError> {
    let cubic = hsiang_cubic(d)?.scaled(1.0 / (2.0 * SQRT_2));
    Ok(poly_field(cubic.0, format!("hsiang(d={d})"), WeightSpec::Radial { lambda: -0.5 }))
}

/// The complexified eigencubic; a member of the holomorphic class with `μ = ½|z|²`.
pub fn hsiang_holo(d: usize) -> Result<HoloField, JordanError> {
    let cubic = hsiang_cubic(d)?.scaled(1.0 / (2.0 * SQRT_2));
    Ok(HoloField::from_polynomial(cubic.0, format!("hsiang-holo(d={d})")))
}

pub(crate) fn poly_field(p: Polynomial, name: String, weight: WeightSpec) -> ScalarField {
    let n = p.n();
    let p = Arc::new(p);
    ScalarField::new(n, name, move |x| Ok(p.jet_real(x))).with_weight(weight)
}

/// `b`-orthonormal basis `eᵢ = embed(unitᵢ)/√2` of the traceless subspace.
pub fn orthonormal_basis(d: usize) -> Result<Vec<JordanElement>, JordanError> {
    check_dimension(d)?;
    let n = chart_dim(d);
    (0..n)
        .map(|i| {
            let mut u = vec![0.0; n];
            u[i] = 1.0;
            Ok(embed_coords(d, &u)?.scale(1.0 / SQRT_2))
        })
        .collect()
}

/// `‖Σeᵢ² − (N/4)e‖` over the orthonormal traceless basis.
pub fn basis_square_sum_residual(d: usize) -> Result<f64, JordanError> {
    let basis = orthonormal_basis(d)?;
    let n = basis.len() as f64;
    let mut acc = JordanElement::identity(d)?.scale(-n / 4.0);
    for e in &basis {
        acc = acc.add(&jordan_mul(e, e)?)?;
    }
    Ok(bilinear_b(&acc, &acc)?.sqrt())
}

/// Gradient of [`hsiang_field`] at `ξ` from `∂f/∂ξⱼ = ½b(x², eⱼ)` with `x = Σξⱼeⱼ`.
pub fn hsiang_gradient_closed_form(d: usize, xi: &[f64]) -> Result<Vec<f64>, JordanError> {
    let basis = orthonormal_basis(d)?;
    if xi.len() != basis.len() {
        return Err(JordanError::CoordinateCount { expected: basis.len(), got: xi.len() });
    }
    let raw: Vec<f64> = xi.iter().map(|c| c / SQRT_2).collect();
    let x = embed_coords(d, &raw)?;
    let x2 = jordan_mul(&x, &x)?;
    basis.iter().map(|e| Ok(0.5 * bilinear_b(&x2, e)?)).collect()
}

/// Signs `s₁..s₆` of the rotation `z'_{2i−1} = s_{2i−1}(z_{2i−1} + z_{2i})/√2`,
/// `z'_{2i} = s_{2i}(z_{2i−1} − z_{2i})/√2` that turn `f₁` into a determinant.
/// The first working pattern in the enumeration order of [`search_f1_signs`].
pub const F1_SIGNS: [f64; 6] = [1.0, -1.0, -1.0, 1.0, -1.0, 1.0];

/// `√2·det [[v₁, z₆', z₃'], [z₅', v₂, z₂'], [z₄', z₁', v₃]]` at a raw-chart point of ℝ⁹.
pub fn f1_determinant_form(signs: &[f64; 6], x: &[f64]) -> f64 {
    let (v, z) = (&x[..3], &x[3..9]);
    let s = 1.0 / SQRT_2;
    let mut zp = [0.0; 6];
    for i in 0..3 {
        let (a, b) = (z[2 * i], z[2 * i + 1]);
        zp[2 * i] = signs[2 * i] * s * (a + b);
        zp[2 * i + 1] = signs[2 * i + 1] * s * (a - b);
    }
    let m = [[v[0], zp[5], zp[2]], [zp[4], v[1], zp[1]], [zp[3], zp[0], v[2]]];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    SQRT_2 * det
}

/// Tries the 64 sign patterns (bit `k` set means `s_{k+1} = −1`) and returns the
/// first one for which the determinant form matches `f₁` at every probe point.
pub fn search_f1_signs(probes: &[Vec<f64>]) -> Result<Option<[f64; 6]>, JordanError> {
    let f1 = hsiang_cubic(1)?;
    for mask in 0u32..64 {
        let signs: [f64; 6] = std::array::from_fn(|k| if mask >> k & 1 == 1 { -1.0 } else { 1.0 });
        let ok = probes.iter().all(|x| {
            let a = f1.eval(x);
            let b = f1_determinant_form(&signs, x);
            (a - b).abs() <= 1e-12 * (1.0 + a.abs())
        });
        if ok {
            return Ok(Some(signs));
        }
    }
    Ok(None)
}

/// `(f₁(x), determinant form at the rotated coordinates)` with the frozen signs.
pub fn f1_determinant_equivalence(x: &[f64]) -> Result<(f64, f64), JordanError> {
    if x.len() != 9 {
        return Err(JordanError::CoordinateCount { expected: 9, got: x.len() });
    }
    let f1 = hsiang_cubic(1)?;
    Ok((f1.eval(x), f1_determinant_form(&F1_SIGNS, x)))
}

fn mono(vars: [usize; 3]) -> Monomial {
    Monomial::from_pairs(vars.map(|v| (v, 1)))
}

/// `Re` and `Im` of `z₁z₂z₃` on ℝ⁶ with `z_k = x_k + i x_{k+3}`:
///
/// ```text
/// u = x₁x₂x₃ − x₁x₅x₆ − x₄x₂x₆ − x₃x₄x₅
/// v = x₁x₂x₆ + x₁x₃x₅ + x₂x₃x₄ − x₄x₅x₆
/// ```
///
/// Both satisfy `Δ₁w = −2|x|²w`.
pub fn f0_complexified_twins() -> (ScalarField, ScalarField) {
    let u = Polynomial::from_terms(
        6,
        [(mono([0, 1, 2]), 1.0), (mono([0, 4, 5]), -1.0), (mono([3, 1, 5]), -1.0), (mono([2, 3, 4]), -1.0)],
    );
    let v = Polynomial::from_terms(
        6,
        [(mono([0, 1, 5]), 1.0), (mono([0, 2, 4]), 1.0), (mono([1, 2, 3]), 1.0), (mono([3, 4, 5]), -1.0)],
    );
    let w = WeightSpec::Radial { lambda: -2.0 };
    (poly_field(u, "f0-twins-u".into(), w), poly_field(v, "f0-twins-v".into(), w))
}
