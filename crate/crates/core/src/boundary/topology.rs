//! Chern numbers of line bundles over `∂Y` and the boundary index formula.

use super::bundle::ComplexLineBundle;
use super::mesh::SurfaceMesh;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Distance to the nearest integer beyond which a Chern number is rejected.
pub const INTEGRALITY_TOLERANCE: f64 = 0.1;

/// Unrounded first Chern number.
///
/// Fibres are compared by projection transport `b_p ↦ P_q b_p = z b_q`.
/// Because `n` differs between the endpoints, `z_qp ≠ conj(z_pq)` at finite
/// resolution; the edge phase is the symmetrised `(arg z_pq − arg z_qp)/2`,
/// which makes the face sum an exact multiple of `2π`. The holonomy of each
/// face is taken in the orientation of `(v, n×v)` and the sign is fixed so
/// that `c₁(T∂Y, n×) = χ(∂Y)`.
pub fn chern_value(bundle: &ComplexLineBundle, mesh: &SurfaceMesh) -> f64 {
    let phase = |p: usize, q: usize| num_complex::Complex64::from_polar(1.0, 0.5 * (bundle.link(p, q).arg() - bundle.link(q, p).arg()));
    let total: f64 = mesh.faces().iter().map(|&[a, b, c]| (phase(a, b) * phase(b, c) * phase(c, a)).arg()).sum();
    total / std::f64::consts::TAU
}

pub fn chern_number(bundle: &ComplexLineBundle, mesh: &SurfaceMesh) -> Result<i64> {
    let value = chern_value(bundle, mesh);
    if (value - value.round()).abs() > INTEGRALITY_TOLERANCE {
        return Err(Error::NonIntegral { value });
    }
    Ok(value.round() as i64)
}

/// Topological data of the boundary problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexData {
    /// Total genus over all components.
    pub genus: u32,
    pub component_genera: Vec<u32>,
    pub euler_characteristic: i64,
    pub c1: i64,
    /// `c₁ + Σ(1 − gᵢ) = c₁ + χ/2`; for connected `∂Y` this is `c₁ + 1 − g`.
    pub index: i64,
}

pub fn index_of(mesh: &SurfaceMesh, nu_x: &ComplexLineBundle) -> Result<IndexData> {
    let c1 = chern_number(nu_x, mesh)?;
    let component_genera = mesh.component_genera();
    let genus = component_genera.iter().sum::<u32>();
    let index = c1 + component_genera.len() as i64 - genus as i64;
    Ok(IndexData { genus, component_genera, euler_characteristic: mesh.euler_characteristic(), c1, index })
}

/// Chern numbers entering `μ_X* ≅ ν_X ⊗ T∂Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorRelation {
    pub c1_nu: i64,
    pub c1_mu: i64,
    pub c1_tangent: i64,
    /// `|c₁(μ) + c₁(ν) + c₁(T)|`.
    pub residual: i64,
}

pub fn tensor_relation_check(
    mesh: &SurfaceMesh,
    nu_x: &ComplexLineBundle,
    mu_x: &ComplexLineBundle,
    tangent: &ComplexLineBundle,
) -> Result<TensorRelation> {
    let (c1_nu, c1_mu, c1_tangent) = (chern_number(nu_x, mesh)?, chern_number(mu_x, mesh)?, chern_number(tangent, mesh)?);
    Ok(TensorRelation { c1_nu, c1_mu, c1_tangent, residual: (c1_mu + c1_nu + c1_tangent).abs() })
}
