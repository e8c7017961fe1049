//! Sparse multivariate polynomials with real coefficients.
//!
//! Used for the symbolic Jordan-algebra expansion (where coefficients are
//! accumulated by polynomial arithmetic) and as a direct jet evaluator: a
//! monomial's gradient and Hessian follow from the exponent rule, so a
//! polynomial with real coefficients evaluates to a [`Jet2`] on real points
//! and to a holomorphic [`CJet2`] on complex points with one code path.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::jets::{CJet2, Jet, Jet2, JetScalar};

/// A monomial as sorted `(variable, exponent)` pairs with positive exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Self(vec![(i, 1)])
    }

    /// Builds a monomial from `(variable, exponent)` pairs in any order.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Self(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v)
    }

    /// Dense exponent vector of length `n`.
    pub fn exponents(&self, n: usize) -> Vec<u32> {
        let mut e = vec![0; n];
        for &(v, k) in &self.0 {
            e[v] = k;
        }
        e
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_pairs(self.0.iter().chain(&other.0).copied())
    }
}

fn ipow<T: JetScalar>(x: T, k: u32) -> T {
    let mut acc = T::one();
    for _ in 0..k {
        acc = acc * x;
    }
    acc
}

/// Sparse polynomial in `n` variables.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(n: usize, i: usize) -> Self {
        assert!(i < n, "variable {i} out of range for {n} variables");
        let mut p = Self::zero(n);
        p.add_term(Monomial::var(i), 1.0);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, f64)>) -> Self {
        let mut p = Self::zero(n);
        for (m, c) in terms {
            assert!(m.max_var().map_or(true, |v| v < n), "monomial variable out of range");
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&m);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    /// Drops coefficients with magnitude at or below `threshold`.
    pub fn cleaned(mut self, threshold: f64) -> Self {
        self.terms.retain(|_, c| c.abs() > threshold);
        self
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { n: self.n, terms: self.terms.iter().map(|(m, &v)| (m.clone(), v * c)).collect() }
    }

    /// Every term has total degree `d` (the zero polynomial qualifies).
    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn eval<T: JetScalar>(&self, x: &[T]) -> T {
        self.terms
            .iter()
            .map(|(m, &c)| m.0.iter().fold(T::from(c), |acc, &(v, e)| acc * ipow(x[v], e)))
            .fold(T::zero(), |a, b| a + b)
    }

    /// Value, gradient and Hessian at `x` by the exponent rule.
    pub fn jet<T: JetScalar>(&self, x: &[T]) -> Jet<T> {
        assert_eq!(x.len(), self.n, "point dimension");
        let n = self.n;
        let mut value = T::zero();
        let mut grad = vec![T::zero(); n];
        let mut hess = vec![T::zero(); n * n];
        for (m, &c) in &self.terms {
            let f = m.factors();
            let k = f.len();
            // powers x^e, x^(e-1), x^(e-2) per factor
            let pw: Vec<[T; 3]> = f
                .iter()
                .map(|&(v, e)| {
                    let p2 = if e >= 2 { ipow(x[v], e - 2) } else { T::zero() };
                    let p1 = if e >= 1 { ipow(x[v], e - 1) } else { T::zero() };
                    [ipow(x[v], e), p1, p2]
                })
                .collect();
            let others = |skip: &[usize]| -> T {
                (0..k).filter(|i| !skip.contains(i)).fold(T::from(c), |acc, i| acc * pw[i][0])
            };
            value = value + others(&[]);
            for a in 0..k {
                let (va, ea) = f[a];
                let da = T::from(f64::from(ea)) * pw[a][1];
                grad[va] = grad[va] + da * others(&[a]);
                if ea >= 2 {
                    let daa = T::from(f64::from(ea) * f64::from(ea - 1)) * pw[a][2];
                    hess[va * n + va] = hess[va * n + va] + daa * others(&[a]);
                }
                for b in (a + 1)..k {
                    let (vb, eb) = f[b];
                    let db = T::from(f64::from(eb)) * pw[b][1];
                    let dab = da * db * others(&[a, b]);
                    // factors are sorted, so va < vb: fill the upper entry only
                    hess[va * n + vb] = hess[va * n + vb] + dab;
                }
            }
        }
        Jet::from_parts(value, grad, hess).expect("consistent dimensions")
    }

    pub fn jet_real(&self, x: &[f64]) -> Jet2 {
        self.jet(x)
    }

    pub fn jet_complex(&self, z: &[Complex64]) -> CJet2 {
        self.jet(z)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.n = out.n.max(rhs.n);
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scaled(-1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.n.max(rhs.n));
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, &c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for &(v, e) in m.factors() {
                if e == 1 {
                    write!(f, "*x{}", v + 1)?;
                } else {
                    write!(f, "*x{}^{e}", v + 1)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(p: &Polynomial, x: &[f64]) {
        let j = p.jet_real(x);
        let h = 1e-5;
        for i in 0..x.len() {
            let mut a = x.to_vec();
            let mut b = x.to_vec();
            a[i] += h;
            b[i] -= h;
            let fd = (p.eval(&a) - p.eval(&b)) / (2.0 * h);
            assert!((fd - j.grad()[i]).abs() < 1e-7 * (1.0 + fd.abs()), "grad {i}");
            let (ja, jb) = (p.jet_real(&a), p.jet_real(&b));
            for k in 0..x.len() {
                let fdh = (ja.grad()[k] - jb.grad()[k]) / (2.0 * h);
                assert!((fdh - j.hess(i, k)).abs() < 1e-7 * (1.0 + fdh.abs()), "hess {i},{k}");
            }
        }
    }

    #[test]
    fn jet_agrees_with_finite_differences() {
        // 3 x0^2 x1 - x1 x2^3 + 2 x0 x1 x2 + 5
        let p = Polynomial::from_terms(
            3,
            [
                (Monomial::from_pairs([(0, 2), (1, 1)]), 3.0),
                (Monomial::from_pairs([(1, 1), (2, 3)]), -1.0),
                (Monomial::from_pairs([(0, 1), (1, 1), (2, 1)]), 2.0),
                (Monomial::one(), 5.0),
            ],
        );
        fd_check(&p, &[0.3, -1.2, 0.8]);
        fd_check(&p, &[1.5, 0.1, -0.7]);
        assert_eq!(p.jet_real(&[0.3, -1.2, 0.8]).value(), p.eval(&[0.3, -1.2, 0.8]));
    }

    #[test]
    fn arithmetic_and_cleanup() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let s = &x + &y;
        let d = &x - &y;
        let prod = &s * &d; // x^2 - y^2
        assert_eq!(prod.len(), 2);
        assert_eq!(prod.coefficient(&Monomial::from_pairs([(0, 2)])), 1.0);
        assert_eq!(prod.coefficient(&Monomial::from_pairs([(1, 2)])), -1.0);
        assert!(prod.is_homogeneous(2));
        let tiny = Polynomial::from_terms(2, [(Monomial::var(0), 1e-16), (Monomial::var(1), 1.0)]);
        assert_eq!(tiny.cleaned(1e-14).len(), 1);
    }

    #[test]
    fn complex_jet_is_holomorphic_extension() {
        let p = Polynomial::from_terms(2, [(Monomial::from_pairs([(0, 2), (1, 1)]), 2.0)]);
        let z = [Complex64::new(0.5, 1.0), Complex64::new(-1.0, 0.25)];
        let j = p.jet_complex(&z);
        assert!((j.value() - z[0] * z[0] * z[1] * 2.0).norm() < 1e-15);
        assert!((j.grad()[0] - z[0] * z[1] * 4.0).norm() < 1e-15);
        assert!((j.hess(0, 1) - z[0] * 4.0).norm() < 1e-15);
        assert_eq!(j.hess(0, 1), j.hess(1, 0));
    }
}
