//! Orthogonal splitting `Λ³ = Λ³₁ ⊕ Λ³₇ ⊕ Λ³₂₇` and the operator `P`.

use super::form::Form;
use super::structure::G2Structure;
use crate::scalar::{solve, unit_vec, Scalar};

/// The three components of a 3-form.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition3<S> {
    pub pi1: Form<S>,
    pub pi7: Form<S>,
    pub pi27: Form<S>,
}

impl<S: Scalar> Decomposition3<S> {
    pub fn sum(&self) -> Form<S> {
        self.pi1.add(&self.pi7).add(&self.pi27)
    }
}

/// `*(φ ∧ dx_i)` for i = 1..7, a basis of Λ³₇.
pub fn lambda7_basis<S: Scalar>(structure: &G2Structure<S>) -> Vec<Form<S>> {
    (0..7)
        .map(|i| {
            let dx = Form::from_coefficients(1, unit_vec::<S>(i).to_vec());
            structure.hodge_star(&structure.phi().wedge(&dx))
        })
        .collect()
}

fn project7<S: Scalar>(psi: &Form<S>, basis: &[Form<S>], structure: &G2Structure<S>) -> Form<S> {
    let gram: Vec<Vec<S>> =
        basis.iter().map(|a| basis.iter().map(|b| structure.form_inner(a, b)).collect()).collect();
    let rhs: Vec<S> = basis.iter().map(|b| structure.form_inner(b, psi)).collect();
    let c = solve(&gram, &rhs).expect("Λ³₇ Gram matrix is nonsingular for a G2-structure");
    basis.iter().zip(c).fold(Form::zero(3), |acc, (b, ci)| acc.add(&b.scale(&ci)))
}

pub fn decompose3<S: Scalar>(psi: &Form<S>, structure: &G2Structure<S>) -> Decomposition3<S> {
    assert_eq!(psi.degree(), 3, "decompose3 expects a 3-form");
    let phi = structure.phi();
    let c1 = structure.form_inner(phi, psi) / structure.form_inner(phi, phi);
    let pi1 = phi.scale(&c1);
    let pi7 = project7(psi, &lambda7_basis(structure), structure);
    let pi27 = psi.sub(&pi1).sub(&pi7);
    Decomposition3 { pi1, pi7, pi27 }
}

/// `P(ψ) = (4/3)π₁ψ + π₇ψ − π₂₇ψ`.
pub fn p_operator<S: Scalar>(psi: &Form<S>, structure: &G2Structure<S>) -> Form<S> {
    let d = decompose3(psi, structure);
    d.pi1.scale(&S::ratio(4, 3)).add(&d.pi7).sub(&d.pi27)
}

/// `*P(ψ)`, the derivative of `ψ ↦ *_ψ ψ` at the structure.
pub fn theta_derivative<S: Scalar>(psi: &Form<S>, structure: &G2Structure<S>) -> Form<S> {
    structure.hodge_star(&p_operator(psi, structure))
}

/// The three 35×35 projector matrices (columns = images of basis forms).
pub fn projector_matrices<S: Scalar>(structure: &G2Structure<S>) -> [Vec<Vec<S>>; 3] {
    let n = 35;
    let mut mats: [Vec<Vec<S>>; 3] = std::array::from_fn(|_| vec![vec![S::zero(); n]; n]);
    let basis7 = lambda7_basis(structure);
    let phi = structure.phi();
    let phi_sq = structure.form_inner(phi, phi);
    for col in 0..n {
        let mut c = vec![S::zero(); n];
        c[col] = S::one();
        let psi = Form::from_coefficients(3, c);
        let pi1 = phi.scale(&(structure.form_inner(phi, &psi) / phi_sq.clone()));
        let pi7 = project7(&psi, &basis7, structure);
        let pi27 = psi.sub(&pi1).sub(&pi7);
        for (m, f) in mats.iter_mut().zip([pi1, pi7, pi27]) {
            for (row, v) in f.coefficients().iter().enumerate() {
                m[row][col] = v.clone();
            }
        }
    }
    mats
}
