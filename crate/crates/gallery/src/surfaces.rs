//! Boundary-operator and index measurements on the gallery surfaces.

use crate::report::IndexSummary;
use assoc_core::boundary::{
    assemble_dl, check_trace_symmetry, chern_number, index_of, mean_curvature_field, normal_basis, principal_curvature_field,
    spectrum, tensor_relation_check, BundleSpec, ComplexLineBundle, NormalDerivative, SurfaceMesh, TraceSymmetry,
};
use assoc_core::g2::G2Structure;
use assoc_core::geometry::{axis, V7};
use assoc_core::Result;
use nalgebra::Matrix2;

pub const E1: [f64; 7] = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
pub const E4: [f64; 7] = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
pub const E5: [f64; 7] = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
pub const E6: [f64; 7] = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
pub const E7: [f64; 7] = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];

/// Grid spacing of the genus-2 tube mesh.
pub const GENUS_TWO_SPACING: f64 = 0.035;

fn st() -> G2Structure<f64> {
    G2Structure::standard()
}

pub fn sphere(level: usize, rho: f64) -> Result<SurfaceMesh> {
    SurfaceMesh::icosphere(level, rho, &st())
}

pub fn ellipsoid(level: usize, axes: [f64; 3]) -> Result<SurfaceMesh> {
    SurfaceMesh::ellipsoid(level, axes[0], axes[1], axes[2], &st())
}

pub fn torus(nu: usize, nv: usize) -> Result<SurfaceMesh> {
    SurfaceMesh::torus_of_revolution(1.0, 0.3, nu, nv, &st())
}

pub fn genus_two() -> Result<SurfaceMesh> {
    SurfaceMesh::genus_two(GENUS_TWO_SPACING, &st())
}

pub fn strip_boundary(n: usize) -> Result<SurfaceMesh> {
    SurfaceMesh::strip_boundary(n, &st())
}

/// `span(e, n×e)` for a constant normal vector `e`.
pub fn nu_of(mesh: &SurfaceMesh, e: [f64; 7]) -> Result<ComplexLineBundle> {
    ComplexLineBundle::from_spec(mesh, &BundleSpec::Constant { basis: vec![e] })
}

/// Complement of `span(e, n×e)` in the normal bundle.
pub fn mu_of(mesh: &SurfaceMesh, e: [f64; 7]) -> Result<ComplexLineBundle> {
    ComplexLineBundle::from_spec(mesh, &BundleSpec::Complement { basis: vec![e] })
}

pub fn tangent(mesh: &SurfaceMesh) -> Result<ComplexLineBundle> {
    ComplexLineBundle::from_spec(mesh, &BundleSpec::TangentRotated { by: None })
}

/// The fixed planes `span(e₄, e₅)` and `span(e₆, e₇)` on the strip boundary.
pub fn strip_bundles(mesh: &SurfaceMesh) -> Result<(ComplexLineBundle, ComplexLineBundle)> {
    Ok((
        ComplexLineBundle::from_spec(mesh, &BundleSpec::Constant { basis: vec![E4, E5] })?,
        ComplexLineBundle::from_spec(mesh, &BundleSpec::Constant { basis: vec![E6, E7] })?,
    ))
}

/// Largest deviation of the eigenvalues of `D_L` from `expected`, per vertex.
pub fn max_spectral_error(mats: &[Matrix2<f64>], expected: &[[f64; 2]]) -> f64 {
    mats.iter()
        .zip(expected)
        .map(|(m, k)| {
            let s = spectrum(m);
            (s[0] - k[0]).abs().max((s[1] - k[1]).abs())
        })
        .fold(0.0, f64::max)
}

/// Relative error of the `D_{μ_X}` spectrum against `{1/ρ, 1/ρ}` on a sphere.
pub fn sphere_spectrum_error(level: usize, rho: f64, e: [f64; 7], evaluator: NormalDerivative) -> Result<f64> {
    let mesh = sphere(level, rho)?;
    let mats = assemble_dl(&mesh, &mu_of(&mesh, e)?, evaluator)?;
    Ok(max_spectral_error(&mats, &vec![[1.0 / rho; 2]; mesh.vertices().len()]) * rho)
}

pub fn trace_symmetry(mesh: &SurfaceMesh, bundle: &ComplexLineBundle, evaluator: NormalDerivative) -> Result<TraceSymmetry> {
    let mats = assemble_dl(mesh, bundle, evaluator)?;
    Ok(check_trace_symmetry(&mats, &mean_curvature_field(mesh)?))
}

/// Spectral error of `D_{μ_X}` against the principal curvatures.
pub fn curvature_spectrum_error(mesh: &SurfaceMesh, e: [f64; 7], evaluator: NormalDerivative) -> Result<f64> {
    let mats = assemble_dl(mesh, &mu_of(mesh, e)?, evaluator)?;
    Ok(max_spectral_error(&mats, &principal_curvature_field(mesh)?))
}

/// Errors and mesh sizes under refinement, with the order observed between
/// the last two levels.
#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub errors: Vec<f64>,
    pub sizes: Vec<f64>,
}

impl Refinement {
    pub fn order(&self) -> f64 {
        let n = self.errors.len();
        if n < 2 {
            return f64::NAN;
        }
        (self.errors[n - 2] / self.errors[n - 1]).ln() / (self.sizes[n - 2] / self.sizes[n - 1]).ln()
    }
}

/// `|trace − 2H|` of the mesh-fit `D_{μ_X}` under refinement.
pub fn trace_refinement(levels: &[usize], build: impl Fn(usize) -> Result<SurfaceMesh>, e: [f64; 7]) -> Result<Refinement> {
    let (mut errors, mut sizes) = (Vec::new(), Vec::new());
    for &l in levels {
        let mesh = build(l)?;
        errors.push(trace_symmetry(&mesh, &mu_of(&mesh, e)?, NormalDerivative::MeshFit)?.trace_residual);
        sizes.push(mesh.mesh_size());
    }
    Ok(Refinement { errors, sizes })
}

/// Largest entry of `D_L` on the flat strip boundary tori, over both evaluators.
pub fn flat_boundary_max(n: usize) -> Result<f64> {
    let mesh = strip_boundary(n)?;
    let (_, mu) = strip_bundles(&mesh)?;
    let mut worst: f64 = 0.0;
    for ev in [NormalDerivative::Ambient, NormalDerivative::MeshFit] {
        for m in assemble_dl(&mesh, &mu, ev)? {
            worst = worst.max(m.amax());
        }
    }
    Ok(worst)
}

/// `∂L ⊂ span(e₂, e₄, e₆)`, a special Lagrangian 3-space.
pub fn special_lagrangian_frame() -> [V7; 3] {
    [axis(1), axis(3), axis(5)]
}

/// `ν_X = e₁ × T∂L` and its complement inside the normal bundle.
pub fn special_lagrangian_bundles(mesh: &SurfaceMesh) -> Result<(ComplexLineBundle, ComplexLineBundle)> {
    let nu = ComplexLineBundle::from_spec(mesh, &BundleSpec::TangentRotated { by: Some(E1) })?;
    let first: Vec<V7> = (0..mesh.vertices().len())
        .map(|i| {
            let [b, jb] = nu.bases()[i];
            normal_basis(mesh.frame())
                .iter()
                .map(|u| u - b * b.dot(u) - jb * jb.dot(u))
                .max_by(|x, y| x.norm().total_cmp(&y.norm()))
                .expect("normal basis is nonempty")
        })
        .collect();
    let mu = ComplexLineBundle::from_bases(mesh, &first)?;
    Ok((nu, mu))
}

pub fn index_row(label: &str, mesh: &SurfaceMesh, nu: &ComplexLineBundle, mu: &ComplexLineBundle, expected_index: i64) -> Result<IndexSummary> {
    let d = index_of(mesh, nu)?;
    let r = tensor_relation_check(mesh, nu, mu, &tangent(mesh)?)?;
    Ok(IndexSummary {
        label: label.into(),
        euler_characteristic: d.euler_characteristic,
        component_genera: d.component_genera,
        c1: d.c1,
        c1_mu: r.c1_mu,
        c1_tangent: r.c1_tangent,
        tensor_residual: r.residual,
        index: d.index,
        expected_index,
    })
}

/// Index and tensor relation on the ball, the strip and the special
/// Lagrangian boundaries of genus 0, 1 and 2.
pub fn index_table(sphere_level: usize) -> Result<Vec<IndexSummary>> {
    let ball = sphere(sphere_level, 1.0)?;
    let strip = strip_boundary(8)?;
    let (strip_nu, strip_mu) = strip_bundles(&strip)?;
    let mut rows = vec![
        index_row("ball", &ball, &nu_of(&ball, E4)?, &mu_of(&ball, E4)?, 1)?,
        index_row("strip", &strip, &strip_nu, &strip_mu, 0)?,
    ];
    let frame = special_lagrangian_frame();
    let sl = [
        ("special-lagrangian-sphere", sphere(sphere_level, 1.0)?.embedded_in(frame)?, 0),
        ("special-lagrangian-torus", torus(40, 16)?.embedded_in(frame)?, 1),
        ("special-lagrangian-genus-two", SurfaceMesh::genus_two_in(GENUS_TWO_SPACING, frame, &st())?, 2),
    ];
    for (label, mesh, g) in sl {
        let (nu, mu) = special_lagrangian_bundles(&mesh)?;
        rows.push(index_row(label, &mesh, &nu, &mu, g - 1)?);
    }
    Ok(rows)
}

/// `c₁(T∂Y)` on the sphere, torus and genus-2 surfaces.
pub fn tangent_chern_numbers(sphere_level: usize) -> Result<[i64; 3]> {
    let s = sphere(sphere_level, 1.0)?;
    let t = torus(40, 16)?;
    let g = genus_two()?;
    Ok([chern_number(&tangent(&s)?, &s)?, chern_number(&tangent(&t)?, &t)?, chern_number(&tangent(&g)?, &g)?])
}
