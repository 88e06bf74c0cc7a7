//! Adapted orthonormal frames along a patch.

use super::patch::ImmersedPatch;
use super::{axis, chi, cross, V7};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Orthonormal tangent and normal frames at a point, plus the matrix `M`
/// expressing `e_i = Σ_a ∂_a X · M_{ai}`.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    pub tangent: Vec<V7>,
    pub normal: Vec<V7>,
    pub coordinate_map: DMatrix<f64>,
}

impl AdaptedFrame {
    /// Largest deviation from orthonormality of the full frame.
    pub fn orthonormality_defect(&self) -> f64 {
        let all: Vec<&V7> = self.tangent.iter().chain(self.normal.iter()).collect();
        let mut d: f64 = 0.0;
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let t = if i == j { 1.0 } else { 0.0 };
                d = d.max((a.dot(b) - t).abs());
            }
        }
        d
    }

    /// Orthogonal projection onto the normal space.
    pub fn project_normal(&self, v: &V7) -> V7 {
        self.normal.iter().fold(V7::zeros(), |acc, n| acc + n * n.dot(v))
    }

    /// Same frame with tangent and normal vectors rotated by orthogonal
    /// matrices (`rt` is p×p, `rn` is q×q; columns give the new vectors).
    pub fn rotated(&self, rt: &DMatrix<f64>, rn: &DMatrix<f64>) -> Self {
        let mix = |vs: &[V7], r: &DMatrix<f64>| -> Vec<V7> {
            (0..vs.len()).map(|j| (0..vs.len()).fold(V7::zeros(), |acc, i| acc + vs[i] * r[(i, j)])).collect()
        };
        Self { tangent: mix(&self.tangent, rt), normal: mix(&self.normal, rn), coordinate_map: &self.coordinate_map * rt }
    }
}

fn gram_schmidt_push(basis: &mut Vec<V7>, v: &V7) -> Option<()> {
    let scale = v.norm();
    let mut w = *v;
    for _ in 0..2 {
        for b in basis.iter() {
            w -= b * b.dot(&w);
        }
    }
    let n = w.norm();
    if n <= 1e-8 * scale.max(1e-300) || n == 0.0 {
        return None;
    }
    basis.push(w / n);
    Some(())
}

/// Completes orthonormal `basis` to a basis of ℝ⁷ with coordinate axes,
/// greedily taking the axis with the largest remaining component.
pub fn complete_basis(mut basis: Vec<V7>) -> Vec<V7> {
    while basis.len() < 7 {
        let best = (0..7)
            .map(|i| {
                let e = axis(i);
                let r = basis.iter().fold(e, |acc, b| acc - b * b.dot(&e));
                (r.norm(), i)
            })
            .fold((-1.0, 0), |a, b| if b.0 > a.0 { b } else { a });
        gram_schmidt_push(&mut basis, &axis(best.1)).expect("greedy completion picks an independent axis");
    }
    basis
}

/// Adapted frame at one parameter point.
pub fn adapted_frame(patch: &ImmersedPatch, p: &[f64]) -> Result<AdaptedFrame> {
    let st = patch.structure();
    let t = patch.tangent_vectors(p);
    let mut tangent: Vec<V7> = Vec::new();
    for v in &t {
        gram_schmidt_push(&mut tangent, v).ok_or_else(|| Error::RankDeficient { point: p.to_vec() })?;
    }
    let dim = tangent.len();
    if dim == 3 && chi(st, &tangent[0], &tangent[1], &tangent[2]).norm() < 1e-6 {
        tangent[2] = cross(st, &tangent[0], &tangent[1]);
    }
    let mut basis = tangent.clone();
    if dim == 2 {
        let n = cross(st, &tangent[0], &tangent[1]);
        basis.push(n / n.norm());
    }
    let basis = complete_basis(basis);
    let normal = basis[dim..].to_vec();
    let tm = DMatrix::from_fn(7, dim, |i, a| t[a][i]);
    let em = DMatrix::from_fn(7, dim, |i, a| tangent[a][i]);
    let gram = tm.transpose() * &tm;
    let coordinate_map = gram
        .try_inverse()
        .ok_or_else(|| Error::RankDeficient { point: p.to_vec() })?
        * tm.transpose()
        * em;
    Ok(AdaptedFrame { tangent, normal, coordinate_map })
}

/// Frames over a list of parameter points (order preserved).
pub fn adapted_frames(patch: &ImmersedPatch, params: &[Vec<f64>]) -> Result<Vec<AdaptedFrame>> {
    params.par_iter().map(|p| adapted_frame(patch, p)).collect()
}
