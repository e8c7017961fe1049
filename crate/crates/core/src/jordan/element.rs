//! Hermitian 4×4 matrices over `F_d` with the Jordan product `x•y = ½(xy + yx)`.

use std::f64::consts::SQRT_2;

use rand::Rng;

use super::division::{check_dimension, qmul, DivisionScalar};
use super::JordanError;

/// Matrix positions `(row, col)` of the off-diagonal slots `z₁..z₆`:
///
/// ```text
/// ⎡ w₁  z₁  z₃  z₅ ⎤
/// ⎢ ·   w₂  z₆  z₄ ⎥
/// ⎢ ·   ·   w₃  z₂ ⎥
/// ⎣ ·   ·   ·   w₄ ⎦
/// ```
pub const OFF_SLOTS: [(usize, usize); 6] = [(0, 1), (2, 3), (0, 2), (1, 3), (0, 3), (1, 2)];

/// Quaternion-valued 4×4 matrix.
pub type QuatMatrix = [[[f64; 4]; 4]; 4];

/// Absolute tolerance (relative to the diagonal size) for the traceless precondition.
pub const TRACELESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct JordanElement {
    d: usize,
    diag: [f64; 4],
    off: [DivisionScalar; 6],
}

fn conj(q: [f64; 4]) -> [f64; 4] {
    [q[0], -q[1], -q[2], -q[3]]
}

pub fn matmul(a: &QuatMatrix, b: &QuatMatrix) -> QuatMatrix {
    let mut out = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let p = qmul(&a[i][k], &b[k][j]);
                for c in 0..4 {
                    out[i][j][c] += p[c];
                }
            }
        }
    }
    out
}

/// Largest deviation of a matrix from Hermitian symmetry.
pub fn hermitian_defect(m: &QuatMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for c in 1..4 {
            worst = worst.max(m[i][i][c].abs());
        }
        for j in (i + 1)..4 {
            let cj = conj(m[j][i]);
            for c in 0..4 {
                worst = worst.max((m[i][j][c] - cj[c]).abs());
            }
        }
    }
    worst
}

impl JordanElement {
    pub fn new(d: usize, diag: [f64; 4], off: [DivisionScalar; 6]) -> Result<Self, JordanError> {
        check_dimension(d)?;
        if let Some(z) = off.iter().find(|z| z.d() != d) {
            return Err(JordanError::DimensionMismatch { left: d, right: z.d() });
        }
        Ok(Self { d, diag, off })
    }

    pub fn zero(d: usize) -> Result<Self, JordanError> {
        Self::diagonal(d, [0.0; 4])
    }

    pub fn identity(d: usize) -> Result<Self, JordanError> {
        Self::diagonal(d, [1.0; 4])
    }

    pub fn diagonal(d: usize, diag: [f64; 4]) -> Result<Self, JordanError> {
        Self::new(d, diag, [DivisionScalar::zero(d); 6])
    }

    /// Uniform entries in `[-1, 1)`.
    pub fn random(d: usize, rng: &mut impl Rng) -> Result<Self, JordanError> {
        check_dimension(d)?;
        let diag = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let off = std::array::from_fn(|_| DivisionScalar::random(d, rng));
        Self::new(d, diag, off)
    }

    /// Random element of the traceless subspace.
    pub fn random_traceless(d: usize, rng: &mut impl Rng) -> Result<Self, JordanError> {
        let v = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let off = std::array::from_fn(|_| DivisionScalar::random(d, rng));
        traceless_embed(d, v, off)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn diag(&self) -> [f64; 4] {
        self.diag
    }

    pub fn off(&self) -> &[DivisionScalar; 6] {
        &self.off
    }

    pub fn to_matrix(&self) -> QuatMatrix {
        let mut m = [[[0.0; 4]; 4]; 4];
        for i in 0..4 {
            m[i][i][0] = self.diag[i];
        }
        for (z, &(p, q)) in self.off.iter().zip(&OFF_SLOTS) {
            m[p][q] = z.quat();
            m[q][p] = z.conj().quat();
        }
        m
    }

    /// Reads the diagonal real parts and the upper-triangle slots.
    pub fn from_matrix(d: usize, m: &QuatMatrix) -> Result<Self, JordanError> {
        check_dimension(d)?;
        let diag = std::array::from_fn(|i| m[i][i][0]);
        let off = std::array::from_fn(|k| {
            let (p, q) = OFF_SLOTS[k];
            DivisionScalar::from_quat(d, m[p][q])
        });
        Self::new(d, diag, off)
    }

    fn same_d(&self, other: &Self) -> Result<(), JordanError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(JordanError::DimensionMismatch { left: self.d, right: other.d })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, JordanError> {
        self.same_d(other)?;
        Ok(Self {
            d: self.d,
            diag: std::array::from_fn(|i| self.diag[i] + other.diag[i]),
            off: std::array::from_fn(|k| self.off[k].add(&other.off[k])),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { d: self.d, diag: self.diag.map(|w| w * s), off: self.off.map(|z| z.scale(s)) }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, JordanError> {
        self.add(&other.scale(-1.0))
    }

    /// `½(ab + ba)` as a full matrix, before reading back the Hermitian slots.
    pub fn jordan_product_matrix(&self, other: &Self) -> Result<QuatMatrix, JordanError> {
        self.same_d(other)?;
        let (a, b) = (self.to_matrix(), other.to_matrix());
        let (ab, ba) = (matmul(&a, &b), matmul(&b, &a));
        let mut out = [[[0.0; 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for c in 0..4 {
                    out[i][j][c] = 0.5 * (ab[i][j][c] + ba[i][j][c]);
                }
            }
        }
        Ok(out)
    }

    /// Jordan power `x^{•k}`, `k ≥ 1`; the subalgebra generated by `x` is associative.
    pub fn jordan_pow(&self, k: u32) -> Self {
        let mut acc = self.clone();
        for _ in 1..k.max(1) {
            acc = jordan_mul(self, &acc).expect("same algebra");
        }
        acc
    }

    pub fn is_traceless(&self) -> bool {
        let size: f64 = self.diag.iter().map(|w| w.abs()).sum();
        trace_sigma1(self).abs() <= TRACELESS_TOL * (1.0 + size)
    }

    fn require_traceless(&self) -> Result<(), JordanError> {
        if self.is_traceless() {
            Ok(())
        } else {
            Err(JordanError::NotTraceless(trace_sigma1(self)))
        }
    }
}

pub fn jordan_mul(a: &JordanElement, b: &JordanElement) -> Result<JordanElement, JordanError> {
    JordanElement::from_matrix(a.d, &a.jordan_product_matrix(b)?)
}

pub fn trace_sigma1(x: &JordanElement) -> f64 {
    x.diag.iter().sum()
}

/// `b(x, y) = σ₁(x•y) = Σ wᵢw'ᵢ + 2 Σ Re(zⱼ conj z'ⱼ)`.
pub fn bilinear_b(x: &JordanElement, y: &JordanElement) -> Result<f64, JordanError> {
    x.same_d(y)?;
    let diag: f64 = x.diag.iter().zip(&y.diag).map(|(a, b)| a * b).sum();
    let off: f64 =
        x.off.iter().zip(&y.off).map(|(a, b)| a.quat().iter().zip(b.quat()).map(|(p, q)| p * q).sum::<f64>()).sum();
    Ok(diag + 2.0 * off)
}

/// `‖x‖ = √b(x, x)`.
pub fn b_norm(x: &JordanElement) -> f64 {
    bilinear_b(x, x).expect("same algebra").sqrt()
}

/// Orthogonal projection onto the traceless subspace: `x − ¼b(x, e)e`.
pub fn projection(x: &JordanElement) -> JordanElement {
    let e = JordanElement::identity(x.d).expect("valid d");
    let s = bilinear_b(x, &e).expect("same algebra");
    x.sub(&e.scale(0.25 * s)).expect("same algebra")
}

/// Traceless element from `v ∈ ℝ³` and the six off-diagonal entries, with
///
/// ```text
/// w₁ = ( v₁ + v₂ + v₃)/√2     w₂ = ( v₁ − v₂ − v₃)/√2
/// w₃ = (−v₁ + v₂ − v₃)/√2     w₄ = (−v₁ − v₂ + v₃)/√2
/// ```
///
/// The diagonal block is an isometry (`Σwᵢ² = 2|v|²` is matched by the factor
/// 2 on the off-diagonal part), so `b(x, x) = 2(|v|² + Σ|zⱼ|²)`: the chart is
/// conformal with factor 2 and `√2·(v, z)` are `b`-orthonormal coordinates.
pub fn traceless_embed(d: usize, v: [f64; 3], z: [DivisionScalar; 6]) -> Result<JordanElement, JordanError> {
    let s = 1.0 / SQRT_2;
    let [a, b, c] = v;
    let diag = [s * (a + b + c), s * (a - b - c), s * (-a + b - c), s * (-a - b + c)];
    JordanElement::new(d, diag, z)
}

/// Number of raw chart coordinates `3 + 6d`.
pub fn chart_dim(d: usize) -> usize {
    3 + 6 * d
}

/// Index of component `c` of `z_j` (0-based `j`) in the raw chart `(v₁, v₂, v₃, z₁, …, z₆)`.
pub fn chart_index(d: usize, j: usize, c: usize) -> usize {
    3 + j * d + c
}

/// [`traceless_embed`] from a flat raw-chart vector.
pub fn embed_coords(d: usize, coords: &[f64]) -> Result<JordanElement, JordanError> {
    check_dimension(d)?;
    if coords.len() != chart_dim(d) {
        return Err(JordanError::CoordinateCount { expected: chart_dim(d), got: coords.len() });
    }
    let z = std::array::from_fn(|j| {
        let mut q = [0.0; 4];
        for (c, slot) in q.iter_mut().enumerate().take(d) {
            *slot = coords[chart_index(d, j, c)];
        }
        DivisionScalar::from_quat(d, q)
    });
    traceless_embed(d, [coords[0], coords[1], coords[2]], z)
}

fn power_traces(x: &JordanElement, up_to: u32) -> Vec<f64> {
    let mut out = vec![trace_sigma1(x)];
    let mut p = x.clone();
    for _ in 2..=up_to {
        p = jordan_mul(x, &p).expect("same algebra");
        out.push(trace_sigma1(&p));
    }
    out
}

/// `(σ₂, σ₃, σ₄)` of a traceless element from the reduced Newton identities
/// `σ₂ = −½σ₁(x²)`, `σ₃ = ⅓σ₁(x³)`, `σ₄ = ⅛(σ₁(x²)² − 2σ₁(x⁴))`.
pub fn newton_sigmas(x: &JordanElement) -> Result<(f64, f64, f64), JordanError> {
    x.require_traceless()?;
    let p = power_traces(x, 4);
    let (p2, p3, p4) = (p[1], p[2], p[3]);
    Ok((-0.5 * p2, p3 / 3.0, (p2 * p2 - 2.0 * p4) / 8.0))
}

/// `[σ₁, σ₂, σ₃, σ₄]` from the full Newton identities, valid for any element.
pub fn newton_sigmas_general(x: &JordanElement) -> [f64; 4] {
    let p = power_traces(x, 4);
    let (p1, p2, p3, p4) = (p[0], p[1], p[2], p[3]);
    let s2 = 0.5 * (p1 * p1 - p2);
    let s3 = (p1 * p1 * p1 - 3.0 * p1 * p2 + 2.0 * p3) / 6.0;
    let s4 = (p1.powi(4) - 6.0 * p1 * p1 * p2 + 3.0 * p2 * p2 + 8.0 * p1 * p3 - 6.0 * p4) / 24.0;
    [p1, s2, s3, s4]
}

/// `‖x⁴ − ½σ₁(x²)x² − ⅓σ₁(x³)x + ⅛(σ₁(x²)² − 2σ₁(x⁴))e‖ / (1 + b(x, x))²` for traceless `x`.
pub fn hamilton_cayley_residual(x: &JordanElement) -> Result<f64, JordanError> {
    x.require_traceless()?;
    let e = JordanElement::identity(x.d)?;
    let x2 = x.jordan_pow(2);
    let x3 = x.jordan_pow(3);
    let x4 = x.jordan_pow(4);
    let (p2, p3, p4) = (trace_sigma1(&x2), trace_sigma1(&x3), trace_sigma1(&x4));
    let r = x4
        .sub(&x2.scale(0.5 * p2))?
        .sub(&x.scale(p3 / 3.0))?
        .add(&e.scale((p2 * p2 - 2.0 * p4) / 8.0))?;
    let bxx = bilinear_b(x, x)?;
    Ok(b_norm(&r) / (1.0 + bxx).powi(2))
}

/// `|σ₁(x⁵) − (5/6)σ₁(x²)σ₁(x³)| / (1 + b(x, x))^{5/2}` for traceless `x`.
pub fn trace5_identity_residual(x: &JordanElement) -> Result<f64, JordanError> {
    x.require_traceless()?;
    let p = power_traces(x, 5);
    let bxx = bilinear_b(x, x)?;
    Ok((p[4] - 5.0 / 6.0 * p[1] * p[2]).abs() / (1.0 + bxx).powf(2.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn identity_is_unit() {
        let mut r = rng();
        for d in [0, 1, 2, 4] {
            let x = JordanElement::random(d, &mut r).unwrap();
            let e = JordanElement::identity(d).unwrap();
            let p = jordan_mul(&e, &x).unwrap();
            assert!(b_norm(&p.sub(&x).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn diagonal_products_commute() {
        let a = JordanElement::diagonal(1, [1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = JordanElement::diagonal(1, [-1.0, 0.5, 2.0, 3.0]).unwrap();
        assert_eq!(jordan_mul(&a, &b).unwrap().diag(), [-1.0, 1.0, 6.0, 12.0]);
    }

    #[test]
    fn quaternion_product_is_hermitian() {
        let mut r = rng();
        let a = JordanElement::random(4, &mut r).unwrap();
        let b = JordanElement::random(4, &mut r).unwrap();
        assert!(hermitian_defect(&a.jordan_product_matrix(&b).unwrap()) < 1e-14);
        // the plain matrix product is not
        assert!(hermitian_defect(&matmul(&a.to_matrix(), &b.to_matrix())) > 1e-3);
    }

    #[test]
    fn mixed_algebras_rejected() {
        let a = JordanElement::identity(1).unwrap();
        let b = JordanElement::identity(2).unwrap();
        assert!(jordan_mul(&a, &b).is_err());
        assert!(JordanElement::identity(3).is_err());
    }

    #[test]
    fn trace_and_inner_product() {
        let x = JordanElement::diagonal(1, [1.0, 2.0, 3.0, -6.0]).unwrap();
        assert_eq!(trace_sigma1(&x), 0.0);
        let e = JordanElement::identity(2).unwrap();
        assert_eq!(bilinear_b(&e, &e).unwrap(), 4.0);
        let mut r = rng();
        for d in [1, 2, 4] {
            let x = JordanElement::random(d, &mut r).unwrap();
            let closed: f64 = x.diag().iter().map(|w| w * w).sum::<f64>()
                + 2.0 * x.off().iter().map(|z| z.norm_sq()).sum::<f64>();
            let via_product = trace_sigma1(&x.jordan_pow(2));
            assert!((bilinear_b(&x, &x).unwrap() - closed).abs() < 1e-13);
            assert!((via_product - closed).abs() < 1e-13);
        }
    }

    #[test]
    fn newton_examples() {
        let x = JordanElement::diagonal(1, [1.0, 1.0, 1.0, -3.0]).unwrap();
        let (s2, s3, s4) = newton_sigmas(&x).unwrap();
        assert_eq!((s2, s3), (-6.0, -8.0));
        // eigenvalues 1,1,1,−3: σ₄ = −3
        assert_eq!(s4, -3.0);
        assert_eq!(newton_sigmas(&JordanElement::zero(2).unwrap()).unwrap(), (0.0, 0.0, 0.0));
        assert!(newton_sigmas(&JordanElement::identity(1).unwrap()).is_err());
    }

    #[test]
    fn newton_paths_agree() {
        let mut r = rng();
        for d in [1, 2, 4] {
            let x = JordanElement::random_traceless(d, &mut r).unwrap();
            let (s2, s3, s4) = newton_sigmas(&x).unwrap();
            let g = newton_sigmas_general(&x);
            assert!((g[1] - s2).abs() < 1e-12 && (g[2] - s3).abs() < 1e-12 && (g[3] - s4).abs() < 1e-12);
        }
    }

    #[test]
    fn hamilton_cayley_and_trace5() {
        let x = JordanElement::diagonal(1, [1.0, 1.0, 1.0, -3.0]).unwrap();
        assert!(hamilton_cayley_residual(&x).unwrap() <= 1e-14);
        assert_eq!(trace5_identity_residual(&x).unwrap(), 0.0);
        let z = JordanElement::zero(4).unwrap();
        assert_eq!(hamilton_cayley_residual(&z).unwrap(), 0.0);
        assert_eq!(trace5_identity_residual(&z).unwrap(), 0.0);
        let mut r = rng();
        for d in [1, 2, 4] {
            let x = JordanElement::random_traceless(d, &mut r).unwrap();
            assert!(hamilton_cayley_residual(&x).unwrap() <= 1e-12);
            assert!(trace5_identity_residual(&x).unwrap() <= 1e-11);
        }
    }

    #[test]
    fn embed_examples() {
        let x = traceless_embed(1, [1.0, 1.0, 1.0], [DivisionScalar::zero(1); 6]).unwrap();
        let s = 1.0 / SQRT_2;
        assert_eq!(x.diag(), [3.0 * s, -s, -s, -s]);
        let mut r = rng();
        for _ in 0..100 {
            let x = JordanElement::random_traceless(4, &mut r).unwrap();
            assert!(trace_sigma1(&x).abs() < 1e-15);
        }
    }

    #[test]
    fn embed_is_conformal_with_factor_two() {
        let mut r = rng();
        for d in [0, 1, 2, 4] {
            let coords: Vec<f64> = (0..chart_dim(d)).map(|_| r.random_range(-1.0..1.0)).collect();
            let x = embed_coords(d, &coords).unwrap();
            let n2: f64 = coords.iter().map(|c| c * c).sum();
            assert!((bilinear_b(&x, &x).unwrap() - 2.0 * n2).abs() < 1e-13);
        }
        assert!(embed_coords(1, &[0.0; 8]).is_err());
    }

    #[test]
    fn projection_is_traceless() {
        let mut r = rng();
        let x = JordanElement::random(2, &mut r).unwrap();
        assert!(trace_sigma1(&projection(&x)).abs() < 1e-15);
    }
}
