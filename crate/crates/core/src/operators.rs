//! Differential operators read off a [`Jet2`].
//!
//! - `Δf` is the Hessian trace.
//! - `Δ∞f = ∇fᵀ·Hess f·∇f`, the closed form of `½∇f·∇|∇f|²`.
//! - `Δ₁f = |∇f|²Δf − Δ∞f`.
//! - `Δ_p f = |∇f|²Δf + (p − 2)Δ∞f`.
//! - `H = Δ₁f / |∇f|³` is the mean curvature of the level set through the point.

use serde::Serialize;
use thiserror::Error;

use crate::jets::Jet2;

/// Gradient floor below which the level set is treated as singular.
pub const DEFAULT_GRAD_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("critical point: |∇f| = {grad_norm:e} is below the floor {floor:e}")]
    CriticalPoint { grad_norm: f64, floor: f64 },
}

pub fn grad_norm_sq(j: &Jet2) -> f64 {
    j.grad_norm_sq()
}

pub fn laplacian(j: &Jet2) -> f64 {
    (0..j.n()).map(|i| j.hess(i, i)).sum()
}

pub fn inf_laplacian(j: &Jet2) -> f64 {
    let n = j.n();
    let g = j.grad();
    let mut acc = 0.0;
    for i in 0..n {
        let row: f64 = (0..n).map(|k| j.hess(i, k) * g[k]).sum();
        acc += g[i] * row;
    }
    acc
}

pub fn one_laplacian(j: &Jet2) -> f64 {
    grad_norm_sq(j) * laplacian(j) - inf_laplacian(j)
}

pub fn p_laplacian(j: &Jet2, p: f64) -> f64 {
    grad_norm_sq(j) * laplacian(j) + (p - 2.0) * inf_laplacian(j)
}

/// Mean curvature of the level set through the jet's base point.
pub fn mean_curvature(j: &Jet2, grad_floor: f64) -> Result<f64, OperatorError> {
    let g2 = grad_norm_sq(j);
    let g = g2.sqrt();
    if !(g > grad_floor) {
        return Err(OperatorError::CriticalPoint { grad_norm: g, floor: grad_floor });
    }
    Ok(one_laplacian(j) / (g2 * g))
}

/// Numerator of the minimal-graph equation for `x_{N+1} = z(x)`.
pub fn graph_residual(z: &Jet2) -> f64 {
    (1.0 + grad_norm_sq(z)) * laplacian(z) - inf_laplacian(z)
}

/// `(|Δf|, |Δ∞f|)`; both vanish exactly for perfectly harmonic functions.
pub fn ph_residual(j: &Jet2) -> (f64, f64) {
    (laplacian(j).abs(), inf_laplacian(j).abs())
}

/// All operator values at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorValues {
    pub grad_norm_sq: f64,
    pub laplacian: f64,
    pub inf_laplacian: f64,
    pub one_laplacian: f64,
    pub mean_curvature: Option<f64>,
}

impl OperatorValues {
    pub fn from_jet(j: &Jet2, grad_floor: f64) -> Self {
        let grad_norm_sq = grad_norm_sq(j);
        let laplacian = laplacian(j);
        let inf_laplacian = inf_laplacian(j);
        let one_laplacian = grad_norm_sq * laplacian - inf_laplacian;
        let g = grad_norm_sq.sqrt();
        let mean_curvature = (g > grad_floor).then(|| one_laplacian / (grad_norm_sq * g));
        Self { grad_norm_sq, laplacian, inf_laplacian, one_laplacian, mean_curvature }
    }

    pub fn p_laplacian(&self, p: f64) -> f64 {
        self.grad_norm_sq * self.laplacian + (p - 2.0) * self.inf_laplacian
    }
}

/// Local magnitudes used to turn absolute residuals into scale-free ones.
///
/// Each residual is divided by `1 + (sum of the magnitudes of the terms that
/// cancel in it)`, so exact identities land at rounding level whatever the
/// size of the field.
pub mod scale {
    use super::*;

    /// Scale of `Δf`: `1 + ‖Hess f‖_F`.
    pub fn laplacian(j: &Jet2) -> f64 {
        1.0 + j.hess_norm()
    }

    /// Scale of `Δ∞f` and `Δ₁f`: `1 + |∇f|²‖Hess f‖_F`.
    pub fn cubic(j: &Jet2) -> f64 {
        1.0 + j.grad_norm_sq() * j.hess_norm()
    }

    /// Scale of the minimal-graph residual: `1 + (1 + 2|∇z|²)‖Hess z‖_F`.
    pub fn graph(j: &Jet2) -> f64 {
        1.0 + (1.0 + 2.0 * j.grad_norm_sq()) * j.hess_norm()
    }
}

/// Scale-free perfect-harmonicity residuals `(|Δf|/s₁, |Δ∞f|/s₃)`.
pub fn ph_residual_scaled(j: &Jet2) -> (f64, f64) {
    let (lap, inf) = ph_residual(j);
    (lap / scale::laplacian(j), inf / scale::cubic(j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet<F: Fn(&[Jet2]) -> Jet2>(x: &[f64], f: F) -> Jet2 {
        f(&Jet2::variables(x))
    }

    fn x1x2x3(v: &[Jet2]) -> Jet2 {
        &(&v[0] * &v[1]) * &v[2]
    }

    fn sphere(v: &[Jet2]) -> Jet2 {
        let s = v.iter().fold(Jet2::constant(v.len(), 0.0), |acc, x| &acc + &(x * x));
        s.add_scalar(-1.0)
    }

    fn helicoid(v: &[Jet2]) -> Jet2 {
        &v[2] - &Jet2::atan2(&v[1], &v[0]).unwrap()
    }

    #[test]
    fn inf_laplacian_examples() {
        let affine = jet(&[0.3, -2.0], |v| v[0].clone());
        assert_eq!(inf_laplacian(&affine), 0.0);
        assert_eq!(inf_laplacian(&jet(&[1.0, 1.0, 1.0], x1x2x3)), 6.0);
        let polar = jet(&[2.0, 1.0], |v| v[1].try_div(&v[0]).unwrap().atan());
        assert!(inf_laplacian(&polar).abs() < 1e-15);
    }

    #[test]
    fn inf_laplacian_matches_finite_difference_of_grad_norm() {
        // ½∇f·∇|∇f|² by central differences of the AD gradient norm
        let x = [0.7, -1.1, 0.4];
        let gn = |p: &[f64]| jet(p, x1x2x3).grad_norm_sq();
        let j = jet(&x, x1x2x3);
        let h = 1e-5;
        let mut fd = 0.0;
        for i in 0..3 {
            let mut a = x;
            let mut b = x;
            a[i] += h;
            b[i] -= h;
            fd += 0.5 * j.grad()[i] * (gn(&a) - gn(&b)) / (2.0 * h);
        }
        assert!((fd - inf_laplacian(&j)).abs() < 1e-8);
    }

    #[test]
    fn one_laplacian_examples() {
        let affine = jet(&[0.3, -2.0], |v| v[0].scale(2.0).add_scalar(1.0) - v[1].clone());
        assert_eq!(one_laplacian(&affine), 0.0);
        assert_eq!(one_laplacian(&jet(&[1.0, 1.0, 1.0], x1x2x3)), -6.0);
        assert_eq!(one_laplacian(&jet(&[1.0, 0.0, 0.0], sphere)), 16.0);
    }

    #[test]
    fn mean_curvature_examples() {
        assert_eq!(mean_curvature(&jet(&[1.0, 0.0, 0.0], sphere), DEFAULT_GRAD_FLOOR).unwrap(), 2.0);
        let h = mean_curvature(&jet(&[1.0, 1.0, 0.0], helicoid), DEFAULT_GRAD_FLOOR).unwrap();
        assert!(h.abs() < 1e-15);
        let affine = jet(&[5.0, 1.0], |v| &v[0] + &v[1]);
        assert_eq!(mean_curvature(&affine, DEFAULT_GRAD_FLOOR).unwrap(), 0.0);
        let crit = jet(&[0.0, 0.0, 0.0], sphere);
        assert!(matches!(
            mean_curvature(&crit, DEFAULT_GRAD_FLOOR),
            Err(OperatorError::CriticalPoint { .. })
        ));
    }

    #[test]
    fn graph_residual_examples() {
        let affine = jet(&[1.0, 2.0], |v| v[0].scale(3.0) + v[1].clone());
        assert_eq!(graph_residual(&affine), 0.0);
        let z = jet(&[1.0, 2.0], |v| Jet2::atan2(&v[1], &v[0]).unwrap());
        assert!(graph_residual(&z).abs() < 1e-15);
        // |∇z|² = 4, Δz = 4, Δ∞z = 8, so (1 + 4)·4 − 8 = 12
        let paraboloid = jet(&[1.0, 0.0], |v| &(&v[0] * &v[0]) + &(&v[1] * &v[1]));
        assert_eq!(graph_residual(&paraboloid), 12.0);
    }

    #[test]
    fn ph_residual_examples() {
        let (a, b) = ph_residual(&jet(&[1.0, 1.0, 5.0], helicoid));
        assert!(a < 1e-12 && b < 1e-12);
        assert_eq!(ph_residual(&jet(&[1.0], |v| &v[0] * &v[0])), (2.0, 8.0));
        assert_eq!(ph_residual(&jet(&[4.0, 4.0], |v| &v[0] - &v[1])), (0.0, 0.0));
    }

    #[test]
    fn operator_values_identities() {
        let j = jet(&[0.4, -0.9, 1.3], x1x2x3);
        let ov = OperatorValues::from_jet(&j, DEFAULT_GRAD_FLOOR);
        assert_eq!(ov.one_laplacian, ov.grad_norm_sq * ov.laplacian - ov.inf_laplacian);
        assert_eq!(ov.p_laplacian(2.0), ov.grad_norm_sq * ov.laplacian);
        assert_eq!(ov.p_laplacian(3.0), p_laplacian(&j, 3.0));
        assert!(ov.mean_curvature.is_some());
        let flat = OperatorValues::from_jet(&Jet2::constant(2, 1.0), DEFAULT_GRAD_FLOOR);
        assert_eq!(flat.mean_curvature, None);
    }

    #[test]
    fn homogeneity_of_degree_three() {
        let j = jet(&[0.4, -0.9, 1.3], |v| sphere(v) * x1x2x3(v));
        for c in [-3.0, 0.5, 7.0] {
            let s = j.scale(c);
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
            assert!(rel(inf_laplacian(&s), c * c * c * inf_laplacian(&j)) < 1e-12);
            assert!(rel(one_laplacian(&s), c * c * c * one_laplacian(&j)) < 1e-12);
        }
    }
}
