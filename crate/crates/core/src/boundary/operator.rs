//! The 0-order boundary operator `D_L s = π_L(v×∇⊥_w s − w×∇⊥_v s)`.

use super::bundle::{BundleSpec, ComplexLineBundle, LineField};
use super::mesh::SurfaceMesh;
use crate::error::{Error, Result};
use crate::geometry::{cross, V7};
use nalgebra::{DMatrix, DVector, Matrix2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How `∇⊥` of a section is evaluated at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalDerivative {
    /// Central differences of the analytic line field off the surface.
    /// Requires mesh geometry and a field-backed bundle.
    Ambient,
    /// Quadratic least-squares fit of fibre data over the 2-ring.
    MeshFit,
}

/// Per-vertex matrices of `D_L` in the basis `(b, n×b)`.
pub fn assemble_dl(mesh: &SurfaceMesh, bundle: &ComplexLineBundle, evaluator: NormalDerivative) -> Result<Vec<Matrix2<f64>>> {
    if evaluator == NormalDerivative::Ambient && (mesh.geometry().is_none() || bundle.field().is_none()) {
        return Err(Error::InvalidInput("ambient evaluation needs analytic surface geometry and line field".into()));
    }
    (0..mesh.vertices().len()).into_par_iter().map(|i| dl_at(mesh, bundle, evaluator, i)).collect()
}

fn dl_at(mesh: &SurfaceMesh, bundle: &ComplexLineBundle, evaluator: NormalDerivative, i: usize) -> Result<Matrix2<f64>> {
    let st = mesh.structure();
    let (v, w) = mesh.tangent_frame(i);
    let basis = bundle.bases()[i];
    let grads: [(V7, V7); 2] = match evaluator {
        NormalDerivative::Ambient => {
            let geometry = mesh.geometry().expect("checked");
            let field = bundle.field().expect("checked");
            let p = mesh.vertices()[i];
            let h = f64::EPSILON.cbrt() * p.norm().max(1.0);
            let section = |s: &V7, x: V7| -> V7 {
                let ([a, b], _) = field.fibre(&x, &geometry.inward_normal(&x), st, mesh.frame());
                a * a.dot(s) + b * b.dot(s)
            };
            let d = |s: &V7, dir: &V7| (section(s, p + dir * h) - section(s, p - dir * h)) / (2.0 * h);
            [(d(&basis[0], &v), d(&basis[0], &w)), (d(&basis[1], &v), d(&basis[1], &w))]
        }
        NormalDerivative::MeshFit => {
            let ring = mesh.ring(i, 2);
            let coords: Vec<[f64; 2]> = ring
                .iter()
                .map(|&q| {
                    let d = mesh.displacement(i, q);
                    [d.dot(&v), d.dot(&w)]
                })
                .collect();
            let fit = LocalFit::new(&coords)?;
            let grad = |s: &V7| {
                let data: Vec<V7> = ring.iter().map(|&q| bundle.project(q, s) - s).collect();
                fit.gradient(&data)
            };
            [grad(&basis[0]), grad(&basis[1])]
        }
    };
    let mut m = Matrix2::zeros();
    for (k, (gv, gw)) in grads.iter().enumerate() {
        let (gv, gw) = (mesh.project_normal(gv), mesh.project_normal(gw));
        let ds = cross(st, &v, &gw) - cross(st, &w, &gv);
        for (r, b) in basis.iter().enumerate() {
            m[(r, k)] = b.dot(&ds);
        }
    }
    Ok(m)
}

/// Least-squares fit of a cubic without constant term to differences
/// `f(q) − f(p)`, so constant data gives an exactly zero gradient. The cubic
/// terms keep third-order data out of the gradient coefficients.
pub(crate) struct LocalFit {
    pinv: DMatrix<f64>,
}

impl LocalFit {
    pub(crate) fn new(coords: &[[f64; 2]]) -> Result<Self> {
        if coords.len() < 9 {
            return Err(Error::InvalidInput("fewer than nine neighbours for a cubic fit".into()));
        }
        let scale = coords.iter().map(|c| c[0].hypot(c[1])).fold(0.0, f64::max);
        let a = DMatrix::from_fn(coords.len(), 9, |r, c| {
            let (u, v) = (coords[r][0] / scale, coords[r][1] / scale);
            [u, v, u * u, u * v, v * v, u * u * u, u * u * v, u * v * v, v * v * v][c]
        });
        let svd = a.svd(true, true);
        let pinv = svd.pseudo_inverse(1e-12).map_err(|e| Error::InvalidInput(e.to_string()))?;
        // Undo the coordinate scaling on the coefficients.
        let unscale = DMatrix::from_diagonal(&DVector::from_fn(9, |k, _| scale.powi(-[1, 1, 2, 2, 2, 3, 3, 3, 3][k])));
        Ok(Self { pinv: unscale * pinv })
    }

    fn coefficients(&self, data: &[f64]) -> DVector<f64> {
        &self.pinv * DVector::from_column_slice(data)
    }

    /// `(∂_u f, ∂_v f)` for vector-valued data.
    fn gradient(&self, data: &[V7]) -> (V7, V7) {
        let mut gu = V7::zeros();
        let mut gv = V7::zeros();
        for k in 0..7 {
            let col: Vec<f64> = data.iter().map(|d| d[k]).collect();
            let c = self.coefficients(&col);
            gu[k] = c[0];
            gv[k] = c[1];
        }
        (gu, gv)
    }
}

/// Mean curvature `½ tr A(n)` with respect to the inward normal (positive
/// on convex surfaces). Uses analytic geometry when the mesh carries it,
/// otherwise a local height fit over the 2-ring.
pub fn mean_curvature_field(mesh: &SurfaceMesh) -> Result<Vec<f64>> {
    Ok(principal_curvature_field(mesh)?.iter().map(|k| 0.5 * (k[0] + k[1])).collect())
}

/// Principal curvatures (ascending) with respect to the inward normal.
pub fn principal_curvature_field(mesh: &SurfaceMesh) -> Result<Vec<[f64; 2]>> {
    if let Some(g) = mesh.geometry() {
        return Ok(mesh.vertices().par_iter().map(|x| g.principal_curvatures(x)).collect());
    }
    (0..mesh.vertices().len())
        .into_par_iter()
        .map(|i| {
            let (v, w) = mesh.tangent_frame(i);
            let n = mesh.normals()[i];
            let ring = mesh.ring(i, 2);
            let mut coords = Vec::with_capacity(ring.len());
            let mut heights = Vec::with_capacity(ring.len());
            for &q in &ring {
                let d = mesh.displacement(i, q);
                coords.push([d.dot(&v), d.dot(&w)]);
                heights.push(d.dot(&n));
            }
            let c = LocalFit::new(&coords)?.coefficients(&heights);
            let m = Matrix2::new(2.0 * c[2], c[3], c[3], 2.0 * c[4]);
            let ev = m.symmetric_eigenvalues();
            Ok([ev[0].min(ev[1]), ev[0].max(ev[1])])
        })
        .collect()
}

/// Worst-vertex residuals of the trace and symmetry laws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSymmetry {
    pub trace_residual: f64,
    pub asymmetry: f64,
}

pub fn check_trace_symmetry(matrices: &[Matrix2<f64>], mean_curvature: &[f64]) -> TraceSymmetry {
    let mut out = TraceSymmetry { trace_residual: 0.0, asymmetry: 0.0 };
    for (m, h) in matrices.iter().zip(mean_curvature) {
        out.trace_residual = out.trace_residual.max((m.trace() - 2.0 * h).abs());
        out.asymmetry = out.asymmetry.max((m[(0, 1)] - m[(1, 0)]).abs());
    }
    out
}

/// Ascending eigenvalues of the symmetric part.
pub fn spectrum(m: &Matrix2<f64>) -> [f64; 2] {
    let s = (m + m.transpose()) * 0.5;
    let ev = s.symmetric_eigenvalues();
    [ev[0].min(ev[1]), ev[0].max(ev[1])]
}

/// One row of the positivity probe for nonconstant `e`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub epsilon: f64,
    pub min_eigenvalue: f64,
}

/// Smallest eigenvalue of `D_{μ_X}` over the mesh for `e(x)` tilted at rate
/// `ε`, for each `ε`. Returns the samples and the first `ε` at which
/// positivity is lost, if any.
pub fn epsilon_probe(mesh: &SurfaceMesh, e: &[f64; 7], epsilons: &[f64]) -> Result<(Vec<ProbeSample>, Option<f64>)> {
    let mut samples = Vec::with_capacity(epsilons.len());
    for &epsilon in epsilons {
        let field = LineField::from_spec(&BundleSpec::Varying { e: *e, epsilon, complement: true }, mesh)?;
        let bundle = ComplexLineBundle::from_field(mesh, field)?;
        let mats = assemble_dl(mesh, &bundle, NormalDerivative::Ambient)?;
        let min_eigenvalue = mats.iter().map(|m| spectrum(m)[0]).fold(f64::INFINITY, f64::min);
        samples.push(ProbeSample { epsilon, min_eigenvalue });
    }
    let threshold = samples.iter().find(|s| s.min_eigenvalue <= 0.0).map(|s| s.epsilon);
    Ok((samples, threshold))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_fit_is_exact_on_cubics() {
        let coords: Vec<[f64; 2]> = (0..14).map(|k| {
            let t = k as f64 * 0.7;
            let r = 0.1 + 0.01 * k as f64;
            [r * t.cos(), r * t.sin()]
        }).collect();
        let f = |u: f64, v: f64| 3.0 * u - 2.0 * v + u * u - 4.0 * u * v + 0.5 * v * v * v;
        let data: Vec<V7> = coords.iter().map(|c| V7::repeat(f(c[0], c[1]))).collect();
        let (gu, gv) = LocalFit::new(&coords).unwrap().gradient(&data);
        assert!((gu - V7::repeat(3.0)).amax() < 1e-10 && (gv - V7::repeat(-2.0)).amax() < 1e-10);
    }

    #[test]
    fn local_fit_needs_enough_points() {
        assert!(LocalFit::new(&[[0.1, 0.0]; 8]).is_err());
    }
}
