//! Second fundamental form and the Simons operators `ℛ`, `𝒜`, `ℛ_ν`.

use super::frame::{adapted_frame, AdaptedFrame};
use super::patch::ImmersedPatch;
use super::V7;
use crate::error::Result;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// `A(η_k)` as symmetric p×p matrices in the tangent frame.
#[derive(Clone, Debug)]
pub struct SecondFundamental {
    pub a: Vec<DMatrix<f64>>,
    /// `(1/p) tr A(η_k)` per normal.
    pub mean_curvature: Vec<f64>,
    normal: Vec<V7>,
}

impl SecondFundamental {
    /// `A(n)` for an arbitrary normal vector.
    pub fn shape_operator(&self, n: &V7) -> DMatrix<f64> {
        let p = self.a[0].nrows();
        self.normal.iter().zip(&self.a).fold(DMatrix::zeros(p, p), |acc, (eta, a)| acc + a * eta.dot(n))
    }

    /// Eigenvalues of `A(n)`, ascending.
    pub fn principal_curvatures(&self, n: &V7) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.shape_operator(n)).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    pub fn mean_curvature_along(&self, n: &V7) -> f64 {
        let s = self.shape_operator(n);
        s.trace() / s.nrows() as f64
    }
}

/// `⟨A(η_k) e_i, e_j⟩ = ⟨η_k, ∂²X(e_i, e_j)⟩`.
pub fn second_fundamental(patch: &ImmersedPatch, p: &[f64], frame: &AdaptedFrame) -> SecondFundamental {
    let hess = patch.second_derivatives(p);
    let m = &frame.coordinate_map;
    let dim = patch.dim();
    let a: Vec<DMatrix<f64>> = frame
        .normal
        .iter()
        .map(|eta| {
            let h = DMatrix::from_fn(dim, dim, |i, j| eta.dot(&hess[i][j]));
            let a = m.transpose() * h * m;
            (&a + a.transpose()) * 0.5
        })
        .collect();
    let mean_curvature = a.iter().map(|x| x.trace() / dim as f64).collect();
    SecondFundamental { a, mean_curvature, normal: frame.normal.clone() }
}

/// Ambient Riemann tensor `R(u,v)w`.
pub trait AmbientCurvature: Send + Sync {
    fn riemann(&self, x: &V7, u: &V7, v: &V7, w: &V7) -> V7;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FlatAmbient;

impl AmbientCurvature for FlatAmbient {
    fn riemann(&self, _x: &V7, _u: &V7, _v: &V7, _w: &V7) -> V7 {
        V7::zeros()
    }
}

/// `R(u,v)w = κ(⟨v,w⟩u − ⟨u,w⟩v)`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantCurvature {
    pub kappa: f64,
}

impl AmbientCurvature for ConstantCurvature {
    fn riemann(&self, _x: &V7, u: &V7, v: &V7, w: &V7) -> V7 {
        (u * v.dot(w) - v * u.dot(w)) * self.kappa
    }
}

/// `ℛ`, `𝒜 = AᵗA` and `ℛ_ν = ℛ − 𝒜` as matrices in the normal frame.
#[derive(Clone, Debug)]
pub struct CurvatureOperators {
    pub a: Vec<DMatrix<f64>>,
    pub cal_a: DMatrix<f64>,
    pub cal_r: DMatrix<f64>,
    pub cal_r_nu: DMatrix<f64>,
}

impl CurvatureOperators {
    /// Operators with only `ℛ_ν` prescribed.
    pub fn synthetic(cal_r_nu: DMatrix<f64>) -> Self {
        let q = cal_r_nu.nrows();
        Self { a: Vec::new(), cal_a: DMatrix::zeros(q, q), cal_r: cal_r_nu.clone(), cal_r_nu }
    }
}

pub fn simons_operators_in_frame(
    patch: &ImmersedPatch,
    p: &[f64],
    frame: &AdaptedFrame,
    curvature: &dyn AmbientCurvature,
) -> CurvatureOperators {
    let sff = second_fundamental(patch, p, frame);
    let q = frame.normal.len();
    let cal_a = DMatrix::from_fn(q, q, |k, l| sff.a[k].component_mul(&sff.a[l]).sum());
    let x = patch.position(p);
    let cal_r = DMatrix::from_fn(q, q, |k, l| {
        frame.tangent.iter().map(|e| frame.normal[k].dot(&curvature.riemann(&x, e, &frame.normal[l], e))).sum()
    });
    let cal_r_nu = &cal_r - &cal_a;
    CurvatureOperators { a: sff.a, cal_a, cal_r, cal_r_nu }
}

pub fn simons_operators(patch: &ImmersedPatch, p: &[f64], curvature: &dyn AmbientCurvature) -> Result<CurvatureOperators> {
    let frame = adapted_frame(patch, p)?;
    Ok(simons_operators_in_frame(patch, p, &frame, curvature))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Positive,
    Indefinite,
    Nonpositive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub verdict: Verdict,
    /// Smallest eigenvalue of `ℛ_ν` over all samples (the spectral margin).
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Positive iff the smallest eigenvalue of `ℛ_ν` exceeds `tolerance`;
/// nonpositive iff the largest does not.
pub fn rigidity_check(operators: &[CurvatureOperators], tolerance: f64) -> RigidityReport {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for op in operators {
        let sym = (&op.cal_r_nu + op.cal_r_nu.transpose()) * 0.5;
        for ev in SymmetricEigen::new(sym).eigenvalues.iter() {
            lo = lo.min(*ev);
            hi = hi.max(*ev);
        }
    }
    let verdict = if lo > tolerance {
        Verdict::Positive
    } else if hi <= tolerance {
        Verdict::Nonpositive
    } else {
        Verdict::Indefinite
    };
    RigidityReport { verdict, min_eigenvalue: lo, max_eigenvalue: hi }
}
