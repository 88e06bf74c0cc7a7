//! The associativity defect `F(σ) = χ(∂₁X, ∂₂X, ∂₃X)` of the translated
//! deformation `X = id + σ` of a flat associative.

use super::grid::GridSection;
use super::operator::DiscreteDiracOperator;
use crate::error::{Error, Result};
use crate::geometry::{chi, V7};
use nalgebra::Matrix3;
use num_complex::Complex64;

/// Smallest admissible eigenvalue of the deformed tangent Gram matrix.
const IMMERSION_FLOOR: f64 = 1e-8;

/// `F(σ)` in normal-frame coordinates of the undeformed submanifold.
///
/// The section is read as real (imaginary parts are dropped), so Nyquist
/// components contribute nothing to its derivatives. `χ` is already normal
/// to the deformed tangent space, so no further projection is needed.
pub fn nonlinear_residual(op: &DiscreteDiracOperator, sigma: &GridSection) -> Result<GridSection> {
    let (frame, structure) = op
        .frame()
        .ok_or_else(|| Error::InvalidInput("nonlinear residual needs an operator assembled from a G2 frame".into()))?;
    if sigma.fiber() != 4 {
        return Err(Error::InvalidInput("deformation must be a normal section".into()));
    }
    let re = sigma.real_part();
    let grads: Vec<GridSection> = (0..3).map(|i| re.derivative(i)).collect();
    let domain = *sigma.domain();
    let mut out = GridSection::zeros(domain, 4);
    for node in 0..domain.len() {
        let f: Vec<V7> = (0..3)
            .map(|i| {
                let g: Vec<f64> = grads[i].at(node).iter().map(|z| z.re).collect();
                frame.tangent[i] + frame.lift(&g)
            })
            .collect();
        let gram = Matrix3::from_fn(|a, b| f[a].dot(&f[b]));
        let min_eigenvalue = gram.symmetric_eigenvalues().min();
        if min_eigenvalue < IMMERSION_FLOOR {
            return Err(Error::ImmersionLost { min_eigenvalue });
        }
        let x = chi(structure, &f[0], &f[1], &f[2]);
        for (k, z) in out.at_mut(node).iter_mut().enumerate() {
            *z = Complex64::new(frame.normal[k].dot(&x), 0.0);
        }
    }
    Ok(out)
}
