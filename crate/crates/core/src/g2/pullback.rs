//! Affine maps with orthogonal linear part and pullbacks of constant forms.

use super::form::Form;
use crate::error::{Error, Result};
use crate::exterior;
use crate::scalar::{Scalar, Vec7};

/// `x ↦ A x + b` with `AᵀA = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap<S> {
    matrix: [[S; 7]; 7],
    translation: Vec7<S>,
}

impl<S: Scalar> AffineMap<S> {
    pub fn new(matrix: [[S; 7]; 7], translation: Vec7<S>) -> Result<Self> {
        let mut defect = 0.0f64;
        for i in 0..7 {
            for j in 0..7 {
                let mut s = S::zero();
                for k in 0..7 {
                    s = s + matrix[k][i].clone() * matrix[k][j].clone();
                }
                let target = if i == j { S::one() } else { S::zero() };
                let d = s - target;
                if !d.is_negligible(1e-12) {
                    defect = defect.max(d.abs().to_f64_lossy().max(f64::MIN_POSITIVE));
                }
            }
        }
        if defect > 0.0 {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self { matrix, translation })
    }

    /// Diagonal sign pattern plus translation.
    pub fn signed_diagonal(signs: [i64; 7], translation: Vec7<S>) -> Self {
        let matrix = std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { S::from_int(signs[i]) } else { S::zero() })
        });
        Self { matrix, translation }
    }

    pub fn matrix(&self) -> &[[S; 7]; 7] {
        &self.matrix
    }

    pub fn translation(&self) -> &Vec7<S> {
        &self.translation
    }

    pub fn apply(&self, x: &Vec7<S>) -> Vec7<S> {
        std::array::from_fn(|i| {
            let mut s = self.translation[i].clone();
            for j in 0..7 {
                s = s + self.matrix[i][j].clone() * x[j].clone();
            }
            s
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let matrix = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut s = S::zero();
                for k in 0..7 {
                    s = s + self.matrix[i][k].clone() * other.matrix[k][j].clone();
                }
                s
            })
        });
        let translation = self.apply(&other.translation);
        Self { matrix, translation }
    }

    pub fn is_identity(&self) -> bool {
        (0..7).all(|i| {
            self.translation[i].is_zero()
                && (0..7).all(|j| self.matrix[i][j] == if i == j { S::one() } else { S::zero() })
        })
    }

    fn column(&self, j: usize) -> Vec7<S> {
        std::array::from_fn(|i| self.matrix[i][j].clone())
    }
}

/// Pullback of a constant-coefficient form; translations act trivially.
pub fn pullback<S: Scalar>(form: &Form<S>, map: &AffineMap<S>) -> Form<S> {
    let k = form.degree();
    let t = exterior::table(7, k);
    let cols: Vec<Vec7<S>> = (0..7).map(|j| map.column(j)).collect();
    let coeffs = (0..t.len())
        .map(|r| {
            let args: Vec<Vec7<S>> = t.set(r).iter().map(|&j| cols[j].clone()).collect();
            form.evaluate(&args)
        })
        .collect();
    Form::from_coefficients(k, coeffs)
}

/// The involutions of T⁷ preserving or reversing φ₀:
/// `α, β, γ` (preserve), `σ₀` (preserve), `τ₀` (reverse).
pub fn joyce_involutions<S: Scalar>() -> Vec<(&'static str, AffineMap<S>, i64)> {
    let h = || S::ratio(1, 2);
    let z = S::zero;
    vec![
        ("alpha", AffineMap::signed_diagonal([1, 1, 1, -1, -1, -1, -1], std::array::from_fn(|_| z())), 1),
        ("beta", AffineMap::signed_diagonal([1, -1, -1, 1, 1, -1, -1], [z(), z(), z(), z(), z(), h(), z()]), 1),
        ("gamma", AffineMap::signed_diagonal([-1, 1, -1, 1, -1, 1, -1], [z(), z(), z(), z(), h(), z(), h()]), 1),
        ("sigma0", AffineMap::signed_diagonal([1, -1, -1, 1, 1, -1, -1], [z(), h(), h(), z(), z(), z(), h()]), 1),
        ("tau0", AffineMap::signed_diagonal([1, 1, -1, -1, 1, 1, -1], [z(), z(), h(), h(), z(), z(), h()]), -1),
    ]
}
