//! The Jordan algebra `h₄(F_d)` of Hermitian 4×4 matrices over `F_d`,
//! `d ∈ {0, 1, 2, 4}`, and the Hsiang eigencubics living on its traceless part.

use thiserror::Error;

pub mod cubic;
pub mod division;
pub mod element;

pub use cubic::{
    basis_square_sum_residual, f0_complexified_twins, f1_determinant_equivalence, hsiang_cubic, hsiang_field,
    hsiang_holo, hsiang_raw_field, SparseCubic, F1_SIGNS,
};
pub use division::DivisionScalar;
pub use element::{
    bilinear_b, hamilton_cayley_residual, jordan_mul, newton_sigmas, newton_sigmas_general, projection,
    trace5_identity_residual, trace_sigma1, traceless_embed, JordanElement,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JordanError {
    #[error("algebra dimension must be 0, 1, 2 or 4, got {0}")]
    InvalidDimension(usize),
    #[error("F_{d} scalars take max(d, 1) coefficients (zero for d = 0), got {got}")]
    CoefficientCount { d: usize, got: usize },
    #[error("algebra mismatch: d = {left} vs d = {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("element is not traceless: σ₁ = {0:e}")]
    NotTraceless(f64),
    #[error("expected {expected} coordinates, got {got}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("polynomial is not a homogeneous cubic with finite coefficients")]
    NotCubic,
}
