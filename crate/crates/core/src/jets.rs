//! Second-order forward-mode jets.
//!
//! A jet carries a value together with its full gradient and dense symmetric
//! Hessian with respect to `n` seeded variables. [`Jet2`] is the real flavour
//! used by every differential operator; [`CJet2`] is the holomorphic flavour
//! whose gradient and Hessian hold the complex derivatives `h_{z_i}` and
//! `h_{z_i z_j}`.
//!
//! Hessians are always filled from the upper triangle and mirrored, so
//! symmetry holds bit-for-bit after every operation.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("jet dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("division by a jet with zero value")]
    DivisionByZero,
    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("{func} evaluated at branch point or cut {re}{im:+}i")]
    BranchPoint { func: &'static str, re: f64, im: f64 },
    #[error("atan2 evaluated at the origin")]
    Origin,
    #[error("non-finite jet entry")]
    NonFinite,
}

/// Scalar types a jet can carry.
pub trait JetScalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + From<f64>
{
    fn zero() -> Self {
        Self::from(0.0)
    }
    fn one() -> Self {
        Self::from(1.0)
    }
    fn is_exact_zero(self) -> bool;
    fn is_finite_value(self) -> bool;
}

impl JetScalar for f64 {
    fn is_exact_zero(self) -> bool {
        self == 0.0
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl JetScalar for Complex64 {
    fn is_exact_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Value, gradient and Hessian of a function of `n` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    value: T,
    grad: Vec<T>,
    // row-major n x n, symmetric
    hess: Vec<T>,
}

/// Real second-order jet.
pub type Jet2 = Jet<f64>;
/// Holomorphic second-order jet.
pub type CJet2 = Jet<Complex64>;

fn sym_fill<T: JetScalar>(n: usize, mut entry: impl FnMut(usize, usize) -> T) -> Vec<T> {
    let mut hess = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let v = entry(i, j);
            hess[i * n + j] = v;
            hess[j * n + i] = v;
        }
    }
    hess
}

impl<T: JetScalar> Jet<T> {
    /// The `i`-th coordinate function at `x`: value `x`, gradient `e_i`, zero Hessian.
    pub fn variable(n: usize, i: usize, x: T) -> Result<Self, JetError> {
        if i >= n {
            return Err(JetError::IndexOutOfRange { index: i, dim: n });
        }
        let mut grad = vec![T::zero(); n];
        grad[i] = T::one();
        Ok(Self { value: x, grad, hess: vec![T::zero(); n * n] })
    }

    /// All coordinate jets of a point at once.
    pub fn variables(x: &[T]) -> Vec<Self> {
        let n = x.len();
        (0..n).map(|i| Self::variable(n, i, x[i]).expect("index in range")).collect()
    }

    pub fn constant(n: usize, c: T) -> Self {
        Self { value: c, grad: vec![T::zero(); n], hess: vec![T::zero(); n * n] }
    }

    /// Builds a jet from explicit parts. The Hessian is read from its upper
    /// triangle and mirrored.
    pub fn from_parts(value: T, grad: Vec<T>, hess: Vec<T>) -> Result<Self, JetError> {
        let n = grad.len();
        if hess.len() != n * n {
            return Err(JetError::DimensionMismatch { left: n * n, right: hess.len() });
        }
        let hess = sym_fill(n, |i, j| hess[i * n + j]);
        Ok(Self { value, grad, hess })
    }

    pub fn n(&self) -> usize {
        self.grad.len()
    }

    pub fn value(&self) -> T {
        self.value
    }

    pub fn grad(&self) -> &[T] {
        &self.grad
    }

    pub fn hess(&self, i: usize, j: usize) -> T {
        self.hess[i * self.n() + j]
    }

    /// Row-major Hessian entries.
    pub fn hess_flat(&self) -> &[T] {
        &self.hess
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite_value()
            && self.grad.iter().all(|g| g.is_finite_value())
            && self.hess.iter().all(|h| h.is_finite_value())
    }

    pub fn check_finite(self) -> Result<Self, JetError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(JetError::NonFinite)
        }
    }

    fn same_dim(&self, other: &Self) -> Result<(), JetError> {
        if self.n() != other.n() {
            Err(JetError::DimensionMismatch { left: self.n(), right: other.n() })
        } else {
            Ok(())
        }
    }

    /// Composition `f(self)` given `f(v)`, `f'(v)`, `f''(v)` at the current value.
    pub fn chain(&self, f0: T, f1: T, f2: T) -> Self {
        let n = self.n();
        let g = &self.grad;
        let grad = g.iter().map(|&gi| f1 * gi).collect();
        let hess = sym_fill(n, |i, j| f1 * self.hess[i * n + j] + f2 * g[i] * g[j]);
        Self { value: f0, grad, hess }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, JetError> {
        self.same_dim(other)?;
        Ok(Self {
            value: self.value + other.value,
            grad: self.grad.iter().zip(&other.grad).map(|(&a, &b)| a + b).collect(),
            hess: self.hess.iter().zip(&other.hess).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, JetError> {
        self.same_dim(other)?;
        Ok(Self {
            value: self.value - other.value,
            grad: self.grad.iter().zip(&other.grad).map(|(&a, &b)| a - b).collect(),
            hess: self.hess.iter().zip(&other.hess).map(|(&a, &b)| a - b).collect(),
        })
    }

    /// Leibniz rule: `(ab)'' = a''b + a'⊗b' + b'⊗a' + ab''`.
    pub fn try_mul(&self, other: &Self) -> Result<Self, JetError> {
        self.same_dim(other)?;
        let n = self.n();
        let (a, b) = (self, other);
        let grad = (0..n).map(|i| a.grad[i] * b.value + a.value * b.grad[i]).collect();
        let hess = sym_fill(n, |i, j| {
            a.hess[i * n + j] * b.value
                + (a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i])
                + a.value * b.hess[i * n + j]
        });
        Ok(Self { value: a.value * b.value, grad, hess })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, JetError> {
        self.same_dim(other)?;
        self.try_mul(&other.recip()?)
    }

    pub fn recip(&self) -> Result<Self, JetError> {
        if self.value.is_exact_zero() {
            return Err(JetError::DivisionByZero);
        }
        let inv = T::one() / self.value;
        let inv2 = inv * inv;
        Ok(self.chain(inv, -inv2, T::from(2.0) * inv2 * inv))
    }

    pub fn scale(&self, c: T) -> Self {
        Self {
            value: self.value * c,
            grad: self.grad.iter().map(|&g| g * c).collect(),
            hess: self.hess.iter().map(|&h| h * c).collect(),
        }
    }

    pub fn add_scalar(&self, c: T) -> Self {
        Self { value: self.value + c, ..self.clone() }
    }

    /// Integer power, defined everywhere for `k >= 0` and off zero otherwise.
    pub fn powi(&self, k: i32) -> Result<Self, JetError> {
        if k < 0 && self.value.is_exact_zero() {
            return Err(JetError::DivisionByZero);
        }
        let v = self.value;
        let p = |e: i32| -> T {
            if e == 0 {
                return T::one();
            }
            let mut acc = T::one();
            let base = if e < 0 { T::one() / v } else { v };
            for _ in 0..e.unsigned_abs() {
                acc = acc * base;
            }
            acc
        };
        let kf = f64::from(k);
        Ok(self.chain(p(k), T::from(kf) * p(k - 1), T::from(kf * (kf - 1.0)) * p(k - 2)))
    }

    /// Places this jet's variables at `offset..offset + n` of a jet in `total` variables.
    pub fn embed(&self, total: usize, offset: usize) -> Result<Self, JetError> {
        let n = self.n();
        if offset + n > total {
            return Err(JetError::DimensionMismatch { left: offset + n, right: total });
        }
        let mut grad = vec![T::zero(); total];
        grad[offset..offset + n].copy_from_slice(&self.grad);
        let mut hess = vec![T::zero(); total * total];
        for i in 0..n {
            for j in 0..n {
                hess[(offset + i) * total + offset + j] = self.hess[i * n + j];
            }
        }
        Ok(Self { value: self.value, grad, hess })
    }

    /// Reorders variables: variable `k` of the result is variable `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, JetError> {
        let n = self.n();
        if perm.len() != n {
            return Err(JetError::DimensionMismatch { left: n, right: perm.len() });
        }
        if let Some(&bad) = perm.iter().find(|&&p| p >= n) {
            return Err(JetError::IndexOutOfRange { index: bad, dim: n });
        }
        let grad = perm.iter().map(|&p| self.grad[p]).collect();
        let hess = sym_fill(n, |i, j| self.hess[perm[i] * n + perm[j]]);
        Ok(Self { value: self.value, grad, hess })
    }
}

impl Jet2 {
    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(&self) -> Result<Self, JetError> {
        let c = self.value.cos();
        if c == 0.0 {
            return Err(JetError::Domain { func: "tan", value: self.value });
        }
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        Ok(self.chain(t, sec2, 2.0 * t * sec2))
    }

    pub fn atan(&self) -> Self {
        let v = self.value;
        let d = 1.0 / (1.0 + v * v);
        self.chain(v.atan(), d, -2.0 * v * d * d)
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    /// `e^x - 1`, accurate near zero.
    pub fn exp_m1(&self) -> Self {
        let e = self.value.exp();
        self.chain(self.value.exp_m1(), e, e)
    }

    pub fn ln(&self) -> Result<Self, JetError> {
        let v = self.value;
        if !(v > 0.0) {
            return Err(JetError::Domain { func: "log", value: v });
        }
        Ok(self.chain(v.ln(), 1.0 / v, -1.0 / (v * v)))
    }

    pub fn sqrt(&self) -> Result<Self, JetError> {
        let v = self.value;
        if !(v > 0.0) {
            return Err(JetError::Domain { func: "sqrt", value: v });
        }
        let s = v.sqrt();
        Ok(self.chain(s, 0.5 / s, -0.25 / (s * v)))
    }

    /// Real power. Integer exponents go through [`Jet::powi`]; other exponents
    /// need a positive base.
    pub fn powf(&self, r: f64) -> Result<Self, JetError> {
        if r.fract() == 0.0 && r.abs() <= f64::from(i32::MAX) {
            return self.powi(r as i32);
        }
        let v = self.value;
        if !(v > 0.0) {
            return Err(JetError::Domain { func: "pow", value: v });
        }
        Ok(self.chain(v.powf(r), r * v.powf(r - 1.0), r * (r - 1.0) * v.powf(r - 2.0)))
    }

    /// Angle of the point `(x, y)` in `(-π, π]`, differentiated through both arguments.
    pub fn atan2(y: &Jet2, x: &Jet2) -> Result<Jet2, JetError> {
        y.same_dim(x)?;
        let (yv, xv) = (y.value, x.value);
        let r2 = xv * xv + yv * yv;
        if r2 == 0.0 {
            return Err(JetError::Origin);
        }
        let n = x.n();
        // q = x∇y − y∇x, p = x∇x + y∇y
        let q: Vec<f64> = (0..n).map(|i| xv * y.grad[i] - yv * x.grad[i]).collect();
        let p: Vec<f64> = (0..n).map(|i| xv * x.grad[i] + yv * y.grad[i]).collect();
        let grad = q.iter().map(|&qi| qi / r2).collect();
        let r4 = r2 * r2;
        let hess = sym_fill(n, |i, j| {
            (xv * y.hess[i * n + j] - yv * x.hess[i * n + j]) / r2 - (q[i] * p[j] + q[j] * p[i]) / r4
        });
        Ok(Jet2 { value: yv.atan2(xv), grad, hess })
    }

    /// Frobenius norm of the Hessian.
    pub fn hess_norm(&self) -> f64 {
        self.hess.iter().map(|h| h * h).sum::<f64>().sqrt()
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.grad.iter().map(|g| g * g).sum()
    }
}

fn on_principal_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0
}

impl CJet2 {
    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    /// Principal logarithm; the cut along the non-positive real axis is refused.
    pub fn ln(&self) -> Result<Self, JetError> {
        let v = self.value;
        if on_principal_cut(v) {
            return Err(JetError::BranchPoint { func: "log", re: v.re, im: v.im });
        }
        let inv = v.inv();
        Ok(self.chain(v.ln(), inv, -inv * inv))
    }

    /// Principal real power. Integer exponents are branch-free.
    pub fn powf(&self, r: f64) -> Result<Self, JetError> {
        if r.fract() == 0.0 && r.abs() <= f64::from(i32::MAX) {
            return self.powi(r as i32);
        }
        let v = self.value;
        if on_principal_cut(v) {
            return Err(JetError::BranchPoint { func: "pow", re: v.re, im: v.im });
        }
        let f0 = v.powf(r);
        let inv = v.inv();
        let f1 = f0 * inv * r;
        let f2 = f1 * inv * (r - 1.0);
        Ok(self.chain(f0, f1, f2))
    }

    /// The jet of `Re` of this function in the real chart `(x_1..x_m, y_1..y_m)`,
    /// `z_k = x_k + i y_k`, assembled from the Cauchy–Riemann relations.
    pub fn real_part(&self) -> Jet2 {
        let m = self.n();
        let n = 2 * m;
        let mut grad = vec![0.0; n];
        for k in 0..m {
            grad[k] = self.grad[k].re;
            grad[m + k] = -self.grad[k].im;
        }
        let hess = sym_fill(n, |a, b| {
            let (p, q) = (a % m, b % m);
            let h = self.hess[p * m + q];
            match (a < m, b < m) {
                (true, true) => h.re,
                (false, false) => -h.re,
                _ => -h.im,
            }
        });
        Jet2 { value: self.value.re, grad, hess }
    }

    /// The jet of `Im`, i.e. `Re` of `-i·h`.
    pub fn imag_part(&self) -> Jet2 {
        self.scale(Complex64::new(0.0, -1.0)).real_part()
    }
}

impl<T: JetScalar> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.scale(-T::one())
    }
}

impl<T: JetScalar> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        -&self
    }
}

// Operator forms panic on dimension mismatch; use the `try_*` methods when
// operands come from untrusted combinations.
macro_rules! jet_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl<T: JetScalar> $trait<&Jet<T>> for &Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: &Jet<T>) -> Jet<T> {
                self.$try(rhs).expect("jet dimension mismatch")
            }
        }
        impl<T: JetScalar> $trait<Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: Jet<T>) -> Jet<T> {
                (&self).$method(&rhs)
            }
        }
        impl<T: JetScalar> $trait<&Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $method(self, rhs: &Jet<T>) -> Jet<T> {
                (&self).$method(rhs)
            }
        }
    };
}

jet_binop!(Add, add, try_add);
jet_binop!(Sub, sub, try_sub);
jet_binop!(Mul, mul, try_mul);

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn seed_variable_examples() {
        let j = Jet2::variable(2, 0, 3.0).unwrap();
        assert_eq!(j.value(), 3.0);
        assert_eq!(j.grad(), &[1.0, 0.0]);
        assert!(j.hess_flat().iter().all(|&h| h == 0.0));

        let j = Jet2::variable(1, 0, 0.0).unwrap();
        assert_eq!(j.grad(), &[1.0]);

        let j = Jet2::variable(3, 2, -1.5).unwrap();
        assert_eq!(j.value(), -1.5);
        assert_eq!(j.grad(), &[0.0, 0.0, 1.0]);

        assert_eq!(
            Jet2::variable(2, 2, 1.0).unwrap_err(),
            JetError::IndexOutOfRange { index: 2, dim: 2 }
        );
    }

    #[test]
    fn product_and_sum_of_squares() {
        let v = Jet2::variables(&[3.0, 4.0]);
        let p = &v[0] * &v[1];
        assert_eq!(p.value(), 12.0);
        assert_eq!(p.grad(), &[4.0, 3.0]);
        assert_eq!(p.hess(0, 1), 1.0);
        assert_eq!(p.hess(0, 0), 0.0);

        let s = &(&v[0] * &v[0]) + &(&v[1] * &v[1]);
        assert_eq!(s.value(), 25.0);
        assert_eq!(s.grad(), &[6.0, 8.0]);
        assert_eq!(s.hess_flat(), &[2.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn quotient_matches_central_differences() {
        let f = |a: f64, b: f64| a / b;
        let h = 1e-5;
        let fd0 = (f(1.0 + h, 2.0) - f(1.0 - h, 2.0)) / (2.0 * h);
        let fd1 = (f(1.0, 2.0 + h) - f(1.0, 2.0 - h)) / (2.0 * h);
        let v = Jet2::variables(&[1.0, 2.0]);
        let q = v[0].try_div(&v[1]).unwrap();
        assert_eq!(q.value(), 0.5);
        assert!(close(q.grad()[0], fd0, 1e-9) && close(fd0, 0.5, 1e-9));
        assert!(close(q.grad()[1], fd1, 1e-9) && close(fd1, -0.25, 1e-9));
    }

    #[test]
    fn arithmetic_errors() {
        let a = Jet2::variable(2, 0, 1.0).unwrap();
        let b = Jet2::variable(3, 0, 1.0).unwrap();
        assert_eq!(a.try_mul(&b).unwrap_err(), JetError::DimensionMismatch { left: 2, right: 3 });
        let z = Jet2::constant(2, 0.0);
        assert_eq!(a.try_div(&z).unwrap_err(), JetError::DivisionByZero);
    }

    #[test]
    fn unary_examples() {
        let x = Jet2::variable(1, 0, 1.0).unwrap();
        let a = x.atan();
        assert!(close(a.value(), PI / 4.0, 1e-15));
        assert!(close(a.grad()[0], 0.5, 1e-15));
        assert!(close(a.hess(0, 0), -0.5, 1e-15));

        let e = Jet2::variable(1, 0, 0.0).unwrap().exp();
        assert_eq!((e.value(), e.grad()[0], e.hess(0, 0)), (1.0, 1.0, 1.0));

        // finite-difference oracle for x^1.5 at 4
        let f = |t: f64| t.powf(1.5);
        let h = 1e-4;
        let fd1 = (f(4.0 + h) - f(4.0 - h)) / (2.0 * h);
        let fd2 = (f(4.0 + h) - 2.0 * f(4.0) + f(4.0 - h)) / (h * h);
        let p = Jet2::variable(1, 0, 4.0).unwrap().powf(1.5).unwrap();
        assert!(close(p.value(), 8.0, 1e-12));
        assert!(close(p.grad()[0], fd1, 1e-7) && close(p.grad()[0], 3.0, 1e-12));
        assert!(close(p.hess(0, 0), fd2, 1e-5) && close(p.hess(0, 0), 0.375, 1e-12));
    }

    #[test]
    fn domain_violations_carry_the_value() {
        let x = Jet2::variable(1, 0, -1.0).unwrap();
        assert_eq!(x.ln().unwrap_err(), JetError::Domain { func: "log", value: -1.0 });
        assert!(matches!(x.sqrt(), Err(JetError::Domain { func: "sqrt", .. })));
        assert!(matches!(x.powf(0.5), Err(JetError::Domain { func: "pow", .. })));
        assert!(x.powf(3.0).is_ok());
        assert!(Jet2::constant(1, 0.0).sqrt().is_err());
    }

    #[test]
    fn atan2_examples() {
        let v = Jet2::variables(&[1.0, 0.0]);
        let t = Jet2::atan2(&v[1], &v[0]).unwrap();
        assert_eq!(t.value(), 0.0);
        assert!(close(t.grad()[0], 0.0, 1e-15) && close(t.grad()[1], 1.0, 1e-15));

        let v = Jet2::variables(&[0.0, 1.0]);
        let t = Jet2::atan2(&v[1], &v[0]).unwrap();
        assert!(close(t.value(), PI / 2.0, 1e-15));
        assert!(close(t.grad()[0], -1.0, 1e-15) && close(t.grad()[1], 0.0, 1e-15));

        let f = |a: f64, b: f64| b.atan2(a);
        let h = 1e-5;
        let (x1, x2) = (-1.0, 1.0);
        let fd0 = (f(x1 + h, x2) - f(x1 - h, x2)) / (2.0 * h);
        let fd1 = (f(x1, x2 + h) - f(x1, x2 - h)) / (2.0 * h);
        let v = Jet2::variables(&[x1, x2]);
        let t = Jet2::atan2(&v[1], &v[0]).unwrap();
        assert!(close(t.value(), 3.0 * PI / 4.0, 1e-15));
        assert!(close(t.grad()[0], fd0, 1e-9) && close(fd0, -0.5, 1e-9));
        assert!(close(t.grad()[1], fd1, 1e-9) && close(fd1, -0.5, 1e-9));

        let z = Jet2::variables(&[0.0, 0.0]);
        assert_eq!(Jet2::atan2(&z[1], &z[0]).unwrap_err(), JetError::Origin);
    }

    #[test]
    fn complex_examples() {
        let z = CJet2::variable(1, 0, Complex64::new(1.0, 1.0)).unwrap();
        let sq = &z * &z;
        assert_eq!(sq.value(), Complex64::new(0.0, 2.0));
        assert_eq!(sq.grad()[0], Complex64::new(2.0, 2.0));
        assert_eq!(sq.hess(0, 0), Complex64::new(2.0, 0.0));

        let e = CJet2::variable(1, 0, Complex64::new(0.0, 0.0)).unwrap().exp();
        assert_eq!(e.value(), Complex64::new(1.0, 0.0));
        assert_eq!(e.grad()[0], Complex64::new(1.0, 0.0));
        assert_eq!(e.hess(0, 0), Complex64::new(1.0, 0.0));

        let f = |t: f64| Complex64::new(t, 0.0).powf(0.5);
        let h = 1e-5;
        let fd = (f(4.0 + h) - f(4.0 - h)) / (2.0 * h);
        let r = CJet2::variable(1, 0, Complex64::new(4.0, 0.0)).unwrap().powf(0.5).unwrap();
        assert!((r.value() - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((r.grad()[0] - fd).norm() < 1e-9 && (fd - Complex64::new(0.25, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn complex_branch_points_are_errors() {
        let zero = CJet2::constant(1, Complex64::new(0.0, 0.0));
        assert!(matches!(zero.ln(), Err(JetError::BranchPoint { .. })));
        assert!(matches!(zero.powf(0.5), Err(JetError::BranchPoint { .. })));
        assert!(zero.powf(2.0).is_ok());
        assert!(zero.powf(-1.0).is_err());
        let neg = CJet2::constant(1, Complex64::new(-2.0, 0.0));
        assert!(matches!(neg.ln(), Err(JetError::BranchPoint { .. })));
    }

    #[test]
    fn real_part_follows_cauchy_riemann() {
        // h = z1^2 * z2 at a generic point
        let z = CJet2::variables(&[Complex64::new(0.3, -1.2), Complex64::new(0.7, 0.4)]);
        let h = &(&z[0] * &z[0]) * &z[1];
        let u = h.real_part();
        let v = h.imag_part();
        for k in 0..2 {
            assert!((u.grad()[k] - h.grad()[k].re).abs() <= 1e-12);
            assert!((u.grad()[2 + k] + h.grad()[k].im).abs() <= 1e-12);
            assert!((u.grad()[k] - v.grad()[2 + k]).abs() <= 1e-12);
            assert!((u.grad()[2 + k] + v.grad()[k]).abs() <= 1e-12);
        }
        // harmonic: trace of Hessian cancels exactly
        let lap: f64 = (0..4).map(|i| u.hess(i, i)).sum();
        assert_eq!(lap, 0.0);
    }

    #[test]
    fn embed_and_permute() {
        let v = Jet2::variables(&[2.0, 5.0]);
        let p = &v[0] * &v[1];
        let e = p.embed(4, 1).unwrap();
        assert_eq!(e.grad(), &[0.0, 5.0, 2.0, 0.0]);
        assert_eq!(e.hess(1, 2), 1.0);
        let q = p.permute(&[1, 0]).unwrap();
        assert_eq!(q.grad(), &[2.0, 5.0]);
        assert!(p.embed(2, 1).is_err());
    }
}
