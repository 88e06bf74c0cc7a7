//! The Hodge-theoretic operator `D^∨(α, τ) = (−*dα − dτ, *d*α)` on T³, built
//! per Fourier mode from `d = iξ∧` and the Euclidean Hodge star.
//!
//! Fiber layout: `(α₁, α₂, α₃, τ)`.

use super::grid::GridDomain;
use super::operator::{DiscreteDiracOperator, FiberFrame};
use super::identities::{laplacian_symbol, random_section, spectral_square_defect};
use crate::error::Result;
use crate::exterior::{merge_sign, table};
use crate::geometry::axis;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `ξ ∧ · : Λᵏ(ℝ³) → Λᵏ⁺¹(ℝ³)`.
pub fn wedge_matrix(k: usize, xi: [f64; 3]) -> DMatrix<f64> {
    let (from, to) = (table(3, k), table(3, k + 1));
    let mut m = DMatrix::zeros(to.len(), from.len());
    for r in 0..from.len() {
        let mask = from.mask(r);
        for (j, x) in xi.iter().enumerate() {
            if mask & (1 << j) == 0 {
                m[(to.rank_of(mask | (1 << j)), r)] += merge_sign(1 << j, mask) as f64 * x;
            }
        }
    }
    m
}

/// Euclidean `* : Λᵏ(ℝ³) → Λ³⁻ᵏ(ℝ³)`, `dx_I ∧ *dx_I = vol`.
pub fn star_matrix(k: usize) -> DMatrix<f64> {
    let (from, to) = (table(3, k), table(3, 3 - k));
    let mut m = DMatrix::zeros(to.len(), from.len());
    for r in 0..from.len() {
        let mask = from.mask(r);
        let comp = 0b111 & !mask;
        m[(to.rank_of(comp), r)] = merge_sign(mask, comp) as f64;
    }
    m
}

/// Real symbol `S(ξ)` with `D^∨` acting on the mode `e^{i⟨ξ,x⟩}` as `i S(ξ)`.
pub fn dvee_symbol(xi: [f64; 3]) -> DMatrix<f64> {
    let curl = -(star_matrix(2) * wedge_matrix(1, xi));
    let grad = -wedge_matrix(0, xi);
    let div = star_matrix(3) * wedge_matrix(2, xi) * star_matrix(1);
    let mut m = DMatrix::zeros(4, 4);
    m.view_mut((0, 0), (3, 3)).copy_from(&curl);
    m.view_mut((0, 3), (3, 1)).copy_from(&grad);
    m.view_mut((3, 0), (1, 3)).copy_from(&div);
    m
}

pub fn assemble_dvee(domain: GridDomain) -> Result<DiscreteDiracOperator> {
    let coefficients = std::array::from_fn(|j| {
        let mut xi = [0.0; 3];
        xi[j] = 1.0;
        dvee_symbol(xi)
    });
    DiscreteDiracOperator::from_coefficients(domain, coefficients, None)
}

/// Adds `aλτ` to the 0-form output.
pub fn perturbed_dvee(op: &DiscreteDiracOperator, lambda: f64, a: f64) -> Result<DiscreteDiracOperator> {
    let mut z = DMatrix::zeros(4, 4);
    z[(3, 3)] = a * lambda;
    op.with_zero_order(z)
}

/// `max ‖(D^∨)²u + Δu‖ / ‖u‖` over random sections, with `Δ = Σ ∂ᵢ²`,
/// evaluated per Fourier block.
pub fn dvee_square_residual(op: &DiscreteDiracOperator, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = random_section(op, &mut rng);
        let r = spectral_square_defect(op, &u, |k| DMatrix::identity(4, 4) * Complex64::new(laplacian_symbol(k), 0.0));
        worst = worst.max(r);
    }
    worst
}

/// Frame of `T³ = span(e₂, e₄, e₆)` in `T⁶ × S¹` with normal
/// `(e₃, e₅, e₇, e₁)`: the first three are `J` of the tangent vectors, the
/// last is the circle direction. In this frame the twisted Dirac operator
/// coincides with `D^∨`.
pub fn special_lagrangian_frame() -> FiberFrame {
    FiberFrame { tangent: [axis(1), axis(3), axis(5)], normal: [axis(2), axis(4), axis(6), axis(0)] }
}
