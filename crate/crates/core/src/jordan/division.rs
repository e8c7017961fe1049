//! The real division algebras ℝ, ℂ, ℍ (and the zero algebra) as subalgebras
//! of the quaternions.

use std::ops::{Add, Mul, Sub};

use rand::Rng;

use super::JordanError;

/// Admissible algebra dimensions.
pub const DIMENSIONS: [usize; 4] = [0, 1, 2, 4];

pub fn check_dimension(d: usize) -> Result<usize, JordanError> {
    if DIMENSIONS.contains(&d) {
        Ok(d)
    } else {
        Err(JordanError::InvalidDimension(d))
    }
}

/// Hamilton product on coefficient arrays `(1, i, j, k)`.
///
/// Generic over the coefficient ring so the same table drives numeric and
/// symbolic (polynomial) arithmetic.
pub fn qmul<T>(a: &[T; 4], b: &[T; 4]) -> [T; 4]
where
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    let p = |i: usize, j: usize| &a[i] * &b[j];
    let r0 = &(&(&p(0, 0) - &p(1, 1)) - &p(2, 2)) - &p(3, 3);
    let r1 = &(&(&p(0, 1) + &p(1, 0)) + &p(2, 3)) - &p(3, 2);
    let r2 = &(&(&p(0, 2) - &p(1, 3)) + &p(2, 0)) + &p(3, 1);
    let r3 = &(&(&p(0, 3) + &p(1, 2)) - &p(2, 1)) + &p(3, 0);
    [r0, r1, r2, r3]
}

/// Real part of the Hamilton product.
pub fn qmul_re<T>(a: &[T; 4], b: &[T; 4]) -> T
where
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T> + Mul<&'a T, Output = T>,
{
    let p = |i: usize| &a[i] * &b[i];
    &(&(&p(0) - &p(1)) - &p(2)) - &p(3)
}

/// An element of `F_d`, stored as a quaternion whose coefficients beyond `d` are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisionScalar {
    d: usize,
    c: [f64; 4],
}

impl DivisionScalar {
    pub fn zero(d: usize) -> Self {
        Self { d, c: [0.0; 4] }
    }

    /// Builds from exactly `max(d, 1)` coefficients; for `d = 0` the single
    /// coefficient must be zero.
    pub fn new(d: usize, coeffs: &[f64]) -> Result<Self, JordanError> {
        check_dimension(d)?;
        if coeffs.len() != d.max(1) {
            return Err(JordanError::CoefficientCount { d, got: coeffs.len() });
        }
        if d == 0 && coeffs[0] != 0.0 {
            return Err(JordanError::CoefficientCount { d, got: 1 });
        }
        let mut c = [0.0; 4];
        c[..d].copy_from_slice(&coeffs[..d]);
        Ok(Self { d, c })
    }

    pub(crate) fn from_quat(d: usize, q: [f64; 4]) -> Self {
        let mut c = [0.0; 4];
        c[..d].copy_from_slice(&q[..d]);
        Self { d, c }
    }

    pub fn random(d: usize, rng: &mut impl Rng) -> Self {
        let mut c = [0.0; 4];
        for x in c.iter_mut().take(d) {
            *x = rng.random_range(-1.0..1.0);
        }
        Self { d, c }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The `d` free coefficients.
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.d]
    }

    pub fn quat(&self) -> [f64; 4] {
        self.c
    }

    pub fn conj(&self) -> Self {
        let [a, b, c, d] = self.c;
        Self { d: self.d, c: [a, -b, -c, -d] }
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum()
    }

    pub fn re(&self) -> f64 {
        self.c[0]
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { d: self.d, c: qmul(&self.c, &other.c) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { d: self.d, c: std::array::from_fn(|i| self.c[i] + other.c[i]) }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { d: self.d, c: self.c.map(|x| x * s) }
    }
}
