//! Pointwise multilinear algebra of G2-structures on ℝ⁷.
//!
//! - [`form`]: constant-coefficient k-forms, wedge, interior product
//! - [`structure`]: φ, metric, orientation, Hodge star, `×`, `χ`
//! - [`plane`]: associative / coassociative / φ-free diagnostics
//! - [`decompose`]: `Λ³₁ ⊕ Λ³₇ ⊕ Λ³₂₇` and `P`
//! - [`pullback`]: affine involutions of T⁷
//!
//! Every routine is generic over [`Scalar`](crate::scalar::Scalar), so the
//! same code runs in exact rationals and in `f64`.

pub mod decompose;
pub mod form;
pub mod json;
pub mod plane;
pub mod pullback;
pub mod structure;

pub use decompose::{decompose3, p_operator, projector_matrices, theta_derivative, Decomposition3};
pub use form::{FourForm, Form, ThreeForm};
pub use plane::{assoc_residual, coassoc_residual, free_margin, reconstruct_section, Plane};
pub use pullback::{joyce_involutions, pullback, AffineMap};
pub use structure::{cross_table, phi0, G2Structure};

/// `φ₀` as a full structure.
pub fn standard_phi<S: crate::scalar::Scalar>() -> G2Structure<S> {
    G2Structure::standard()
}

/// Metric, orientation and `*φ` derived from a 3-form.
pub fn metric_from_3form(phi: ThreeForm<f64>) -> crate::error::Result<G2Structure<f64>> {
    G2Structure::from_phi(phi)
}

/// Hodge star of any k-form.
pub fn hodge_star<S: crate::scalar::Scalar>(form: &Form<S>, structure: &G2Structure<S>) -> Form<S> {
    structure.hodge_star(form)
}
