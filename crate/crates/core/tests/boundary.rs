use assoc_core::boundary::*;
use assoc_core::g2::G2Structure;
use assoc_core::geometry::{axis, cross, V7};
use assoc_core::Error;
use nalgebra::{Matrix2, Matrix3, Rotation3, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const E1: [f64; 7] = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
const E4: [f64; 7] = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
const E6: [f64; 7] = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
const E7: [f64; 7] = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];

fn st() -> G2Structure<f64> {
    G2Structure::standard()
}

fn sphere(level: usize, rho: f64) -> SurfaceMesh {
    SurfaceMesh::icosphere(level, rho, &st()).unwrap()
}

fn bundle(mesh: &SurfaceMesh, spec: BundleSpec) -> ComplexLineBundle {
    ComplexLineBundle::from_spec(mesh, &spec).unwrap()
}

fn nu_e(mesh: &SurfaceMesh) -> ComplexLineBundle {
    bundle(mesh, BundleSpec::Constant { basis: vec![E4] })
}

fn mu_e(mesh: &SurfaceMesh) -> ComplexLineBundle {
    bundle(mesh, BundleSpec::Complement { basis: vec![E4] })
}

fn tangent(mesh: &SurfaceMesh) -> ComplexLineBundle {
    bundle(mesh, BundleSpec::TangentRotated { by: None })
}

fn strip_mu(mesh: &SurfaceMesh) -> ComplexLineBundle {
    bundle(mesh, BundleSpec::Constant { basis: vec![E6, E7] })
}

fn max_spectral_error(mats: &[Matrix2<f64>], expected: &[[f64; 2]]) -> f64 {
    mats.iter()
        .zip(expected)
        .map(|(m, k)| {
            let s = spectrum(m);
            (s[0] - k[0]).abs().max((s[1] - k[1]).abs())
        })
        .fold(0.0, f64::max)
}

fn order(e: &[f64], h: &[f64]) -> f64 {
    let n = e.len();
    (e[n - 2] / e[n - 1]).ln() / (h[n - 2] / h[n - 1]).ln()
}

#[test]
fn tangent_frames_are_orthonormal_and_complex() {
    for mesh in [sphere(2, 0.7), SurfaceMesh::genus_two(0.04, &st()).unwrap(), SurfaceMesh::strip_boundary(6, &st()).unwrap()] {
        for i in 0..mesh.vertices().len() {
            let n = mesh.normals()[i];
            let (v, w) = mesh.tangent_frame(i);
            let gram = [v.norm() - 1.0, w.norm() - 1.0, n.norm() - 1.0, v.dot(&w), v.dot(&n), w.dot(&n)];
            assert!(gram.iter().all(|g| g.abs() < 1e-10));
            assert!((w - cross(&st(), &n, &v)).norm() < 1e-10);
        }
    }
}

#[test]
fn euler_characteristics_and_genera() {
    assert_eq!(sphere(3, 1.0).euler_characteristic(), 2);
    assert_eq!(sphere(3, 1.0).component_genera(), vec![0]);
    let torus = SurfaceMesh::torus_of_revolution(1.0, 0.3, 32, 12, &st()).unwrap();
    assert_eq!(torus.euler_characteristic(), 0);
    let g2 = SurfaceMesh::genus_two(0.035, &st()).unwrap();
    assert_eq!(g2.euler_characteristic(), -2);
    assert_eq!(g2.component_genera(), vec![2]);
    let strip = SurfaceMesh::strip_boundary(8, &st()).unwrap();
    assert_eq!(strip.euler_characteristic(), 0);
    assert_eq!(strip.component_genera(), vec![1, 1]);
    let ball = SurfaceMesh::from_implicit(
        |y: [f64; 3]| y[0] * y[0] + y[1] * y[1] + y[2] * y[2] - 0.49,
        [-1.0; 3],
        [1.0; 3],
        0.1,
        [axis(0), axis(1), axis(2)],
        &st(),
    )
    .unwrap();
    assert_eq!(ball.euler_characteristic(), 2);
}

#[test]
fn sphere_mu_spectrum_is_inverse_radius() {
    for rho in [0.5, 1.0, 2.0] {
        let mesh = sphere(3, rho);
        let expected = vec![[1.0 / rho; 2]; mesh.vertices().len()];
        let ambient = assemble_dl(&mesh, &mu_e(&mesh), NormalDerivative::Ambient).unwrap();
        assert!(max_spectral_error(&ambient, &expected) * rho < 1e-8);
        let fit = assemble_dl(&mesh, &mu_e(&mesh), NormalDerivative::MeshFit).unwrap();
        assert!(max_spectral_error(&fit, &expected) * rho < 0.02);
    }
}

#[test]
fn nu_kernel_contains_e_and_other_eigenvalue_is_twice_mean_curvature() {
    let rho = 0.8;
    let mesh = sphere(3, rho);
    let nu = nu_e(&mesh);
    let h = mean_curvature_field(&mesh).unwrap();
    assert!(h.iter().all(|h| (h - 1.0 / rho).abs() < 1e-8));
    for ev in [NormalDerivative::Ambient, NormalDerivative::MeshFit] {
        let mats = assemble_dl(&mesh, &nu, ev).unwrap();
        for (i, m) in mats.iter().enumerate() {
            // The first basis vector of span(e, n×e) is e itself.
            assert!((nu.bases()[i][0] - V7::from(E4)).norm() < 1e-15);
            assert!(m[(0, 0)].abs() < 1e-8 && m[(1, 0)].abs() < 1e-8);
            let tol = if ev == NormalDerivative::Ambient { 1e-8 } else { 5e-3 };
            assert!((m[(1, 1)] - 2.0 * h[i]).abs() < tol);
        }
    }
}

#[test]
fn flat_strip_tori_have_vanishing_boundary_operator() {
    let mesh = SurfaceMesh::strip_boundary(8, &st()).unwrap();
    let h = mean_curvature_field(&mesh).unwrap();
    for ev in [NormalDerivative::Ambient, NormalDerivative::MeshFit] {
        let mats = assemble_dl(&mesh, &strip_mu(&mesh), ev).unwrap();
        assert!(mats.iter().all(|m| *m == Matrix2::zeros()));
        let r = check_trace_symmetry(&mats, &h);
        assert_eq!((r.trace_residual, r.asymmetry), (0.0, 0.0));
    }
}

#[test]
fn sphere_trace_law_converges_under_refinement() {
    let (mut errs, mut sizes) = (Vec::new(), Vec::new());
    for level in [2, 3, 4] {
        let mesh = sphere(level, 0.5);
        let mats = assemble_dl(&mesh, &mu_e(&mesh), NormalDerivative::MeshFit).unwrap();
        errs.push(check_trace_symmetry(&mats, &mean_curvature_field(&mesh).unwrap()).trace_residual);
        sizes.push(mesh.mesh_size());
    }
    assert!(order(&errs, &sizes) >= 1.0, "{errs:?}");
    let mesh = sphere(3, 0.5);
    let mats = assemble_dl(&mesh, &mu_e(&mesh), NormalDerivative::Ambient).unwrap();
    assert!(check_trace_symmetry(&mats, &mean_curvature_field(&mesh).unwrap()).trace_residual < 1e-8);
}

#[test]
fn ellipsoid_spectrum_matches_principal_curvatures() {
    let (mut errs, mut sizes) = (Vec::new(), Vec::new());
    for level in [2, 3, 4] {
        let mesh = SurfaceMesh::ellipsoid(level, 1.0, 0.8, 0.6, &st()).unwrap();
        let k = principal_curvature_field(&mesh).unwrap();
        let mu = mu_e(&mesh);
        let ambient = assemble_dl(&mesh, &mu, NormalDerivative::Ambient).unwrap();
        assert!(max_spectral_error(&ambient, &k) < 1e-8);
        let fit = assemble_dl(&mesh, &mu, NormalDerivative::MeshFit).unwrap();
        errs.push(max_spectral_error(&fit, &k));
        sizes.push(mesh.mesh_size());
    }
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    assert!(order(&errs, &sizes) >= 1.0, "{errs:?}");
}

#[test]
fn ellipsoid_curvatures_agree_with_closed_form_at_axis_points() {
    // At (a,0,0) the curvatures are a/b² and a/c².
    let (a, b, c) = (1.0, 0.8, 0.6);
    let surface = EllipsoidSurface::new(a, b, c, &st());
    let k = surface.principal_curvatures(&(axis(0) * a + axis(2) * 1e-9));
    assert!((k[0] - a / (b * b)).abs() < 1e-5 && (k[1] - a / (c * c)).abs() < 1e-5, "{k:?}");
}

#[test]
fn mesh_fit_symmetry_defect_decays() {
    let mut errs = Vec::new();
    let mut sizes = Vec::new();
    for level in [2, 3, 4] {
        let mesh = SurfaceMesh::ellipsoid(level, 1.0, 0.7, 0.5, &st()).unwrap();
        let mats = assemble_dl(&mesh, &mu_e(&mesh), NormalDerivative::MeshFit).unwrap();
        errs.push(check_trace_symmetry(&mats, &mean_curvature_field(&mesh).unwrap()).asymmetry);
        sizes.push(mesh.mesh_size());
    }
    assert!(order(&errs, &sizes) >= 1.0, "{errs:?}");
}

#[test]
fn boundary_operator_is_frame_independent() {
    let mesh = SurfaceMesh::ellipsoid(3, 1.0, 0.8, 0.6, &st()).unwrap();
    let mu = mu_e(&mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let angles: Vec<f64> = (0..mesh.vertices().len()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    let turned = mu.rotated(&angles);
    let a = assemble_dl(&mesh, &mu, NormalDerivative::MeshFit).unwrap();
    let b = assemble_dl(&mesh, &turned, NormalDerivative::MeshFit).unwrap();
    for ((ma, mb), t) in a.iter().zip(&b).zip(&angles) {
        let r = Matrix2::new(t.cos(), -t.sin(), t.sin(), t.cos());
        assert!((r.transpose() * ma * r - mb).amax() < 1e-10);
        let (sa, sb) = (spectrum(ma), spectrum(mb));
        assert!((sa[0] - sb[0]).abs() < 1e-10 && (sa[1] - sb[1]).abs() < 1e-10);
    }
}

#[test]
fn chern_numbers_of_reference_bundles() {
    let s = sphere(3, 1.0);
    assert_eq!(chern_number(&tangent(&s), &s).unwrap(), 2);
    assert_eq!(chern_number(&nu_e(&s), &s).unwrap(), 0);
    let torus = SurfaceMesh::torus_of_revolution(1.0, 0.3, 40, 16, &st()).unwrap();
    assert_eq!(chern_number(&tangent(&torus), &torus).unwrap(), 0);
    assert_eq!(chern_number(&nu_e(&torus), &torus).unwrap(), 0);
    let g2 = SurfaceMesh::genus_two(0.035, &st()).unwrap();
    assert_eq!(chern_number(&tangent(&g2), &g2).unwrap(), -2);
}

#[test]
fn chern_number_is_invariant_under_refinement_and_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for level in [1, 2, 3, 4] {
        let s = sphere(level, 1.0);
        assert_eq!(chern_number(&tangent(&s), &s).unwrap(), 2);
        assert_eq!(chern_number(&mu_e(&s), &s).unwrap(), -2);
        let axis3 = Vector3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let r: Matrix3<f64> = Rotation3::new(axis3 * 6.0).into_inner();
        let turned = s.rotated(&r).unwrap();
        assert_eq!(chern_number(&tangent(&turned), &turned).unwrap(), 2);
        assert_eq!(chern_number(&mu_e(&turned), &turned).unwrap(), -2);
    }
    for h in [0.04, 0.03] {
        let g2 = SurfaceMesh::genus_two(h, &st()).unwrap();
        assert_eq!(chern_number(&tangent(&g2), &g2).unwrap(), -2);
    }
}

#[test]
fn tensor_relation_holds() {
    let s = sphere(3, 1.0);
    let r = tensor_relation_check(&s, &nu_e(&s), &mu_e(&s), &tangent(&s)).unwrap();
    assert_eq!((r.c1_nu, r.c1_mu, r.c1_tangent, r.residual), (0, -2, 2, 0));

    let strip = SurfaceMesh::strip_boundary(8, &st()).unwrap();
    let nu = bundle(&strip, BundleSpec::Constant { basis: vec![E4, [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]] });
    let r = tensor_relation_check(&strip, &nu, &strip_mu(&strip), &tangent(&strip)).unwrap();
    assert_eq!((r.c1_nu, r.c1_mu, r.c1_tangent, r.residual), (0, 0, 0, 0));

    // Special Lagrangian boundary: ∂L in span(e2,e4,e6), ν_X = e1 × T∂L.
    let sl_frame = [axis(1), axis(3), axis(5)];
    for (mesh, chi) in [
        (sphere(3, 1.0).embedded_in(sl_frame).unwrap(), 2),
        (SurfaceMesh::torus_of_revolution(1.0, 0.3, 40, 16, &st()).unwrap().embedded_in(sl_frame).unwrap(), 0),
        (SurfaceMesh::genus_two_in(0.035, sl_frame, &st()).unwrap(), -2),
    ] {
        let nu = bundle(&mesh, BundleSpec::TangentRotated { by: Some(E1) });
        assert_eq!(chern_number(&nu, &mesh).unwrap(), -chi);
        assert_eq!(chern_number(&tangent(&mesh), &mesh).unwrap(), chi);
        // μ_X is the complement of ν_X inside the normal bundle of L × ℝ.
        let mu_first: Vec<V7> = (0..mesh.vertices().len())
            .map(|i| {
                let [b, jb] = nu.bases()[i];
                normal_basis(mesh.frame())
                    .iter()
                    .map(|u| u - b * b.dot(u) - jb * jb.dot(u))
                    .max_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap())
                    .unwrap()
            })
            .collect();
        let mu = ComplexLineBundle::from_bases(&mesh, &mu_first).unwrap();
        let r = tensor_relation_check(&mesh, &nu, &mu, &tangent(&mesh)).unwrap();
        assert_eq!(r.residual, 0);
    }
}

#[test]
fn index_formula_on_the_examples() {
    let ball = sphere(3, 1.0);
    let d = index_of(&ball, &nu_e(&ball)).unwrap();
    assert_eq!((d.genus, d.c1, d.index), (0, 0, 1));

    let strip = SurfaceMesh::strip_boundary(8, &st()).unwrap();
    let d = index_of(&strip, &strip_mu(&strip)).unwrap();
    assert_eq!((d.component_genera.clone(), d.c1, d.index), (vec![1, 1], 0, 0));

    let sl_frame = [axis(1), axis(3), axis(5)];
    for (mesh, g) in [
        (sphere(3, 1.0).embedded_in(sl_frame).unwrap(), 0i64),
        (SurfaceMesh::torus_of_revolution(1.0, 0.3, 40, 16, &st()).unwrap().embedded_in(sl_frame).unwrap(), 1),
        (SurfaceMesh::genus_two_in(0.035, sl_frame, &st()).unwrap(), 2),
    ] {
        let nu = bundle(&mesh, BundleSpec::TangentRotated { by: Some(E1) });
        let d = index_of(&mesh, &nu).unwrap();
        assert_eq!((d.genus as i64, d.c1, d.index), (g, -(2 - 2 * g), g - 1));
    }
}

#[test]
fn epsilon_probe_reports_a_positivity_threshold() {
    let rho = 1.0;
    let mesh = sphere(2, rho);
    let eps = [0.0, 0.1, 0.25, 0.5, 1.0, 2.0];
    let (samples, threshold) = epsilon_probe(&mesh, &E4, &eps).unwrap();
    assert!((samples[0].min_eigenvalue - 1.0 / rho).abs() < 1e-8);
    assert!(samples.windows(2).all(|w| w[1].min_eigenvalue < w[0].min_eigenvalue));
    let t = threshold.expect("positivity is lost for large tilts");
    assert!(t > 0.1 && t <= 2.0);
}

#[test]
fn non_invariant_plane_is_rejected() {
    let s = sphere(2, 1.0);
    let err = ComplexLineBundle::from_spec(&s, &BundleSpec::Constant { basis: vec![E4, E6] }).unwrap_err();
    assert!(matches!(err, Error::NotComplexLine { .. }));
}

#[test]
fn discontinuous_bundle_is_rejected() {
    let s = sphere(2, 1.0);
    // Fibres alternate between μ_X and ν_X, which are orthogonal.
    let (mu, nu) = (mu_e(&s), nu_e(&s));
    let first: Vec<V7> = (0..s.vertices().len()).map(|i| if i % 2 == 0 { mu.bases()[i][0] } else { nu.bases()[i][0] }).collect();
    assert!(matches!(ComplexLineBundle::from_bases(&s, &first), Err(Error::Discontinuous { .. })));
}

#[test]
fn ambient_evaluator_needs_analytic_data() {
    let s = sphere(2, 1.0);
    let first: Vec<V7> = mu_e(&s).bases().iter().map(|b| b[0]).collect();
    let raw = ComplexLineBundle::from_bases(&s, &first).unwrap();
    assert!(matches!(assemble_dl(&s, &raw, NormalDerivative::Ambient), Err(Error::InvalidInput(_))));
    assert!(assemble_dl(&s, &raw, NormalDerivative::MeshFit).is_ok());
}

#[test]
fn bundle_spec_json() {
    let spec: BundleSpec = serde_json::from_str(r#"{"type":"constant","basis":[[0,0,0,1,0,0,0]]}"#).unwrap();
    assert_eq!(spec, BundleSpec::Constant { basis: vec![E4] });
    let spec: BundleSpec = serde_json::from_str(r#"{"type":"tangent-rotated"}"#).unwrap();
    assert_eq!(spec, BundleSpec::TangentRotated { by: None });
    let spec = BundleSpec::Complement { basis: vec![E4] };
    assert_eq!(serde_json::from_str::<BundleSpec>(&serde_json::to_string(&spec).unwrap()).unwrap(), spec);
    let s = sphere(1, 1.0);
    let tilted = ComplexLineBundle::from_spec(&s, &BundleSpec::Constant { basis: vec![[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]] });
    assert!(matches!(tilted, Err(Error::InvalidInput(_))));
}

#[test]
fn off_and_obj_round_trip() {
    let s = sphere(3, 0.5);
    let text = to_off(&s);
    let (v, f) = parse_off(&text).unwrap();
    let parsed = mesh_from_triangles(&v, &f, &st()).unwrap();
    assert_eq!(parsed.euler_characteristic(), 2);
    assert_eq!(chern_number(&tangent(&parsed), &parsed).unwrap(), 2);
    // Estimated normals must point inward.
    assert!(parsed.normals().iter().zip(parsed.vertices()).all(|(n, x)| n.dot(x) < 0.0));
    let mats = assemble_dl(&parsed, &mu_e(&parsed), NormalDerivative::MeshFit).unwrap();
    let mean: f64 = mats.iter().map(|m| m.trace() / 2.0).sum::<f64>() / mats.len() as f64;
    assert!((mean - 2.0).abs() < 0.05, "{mean}");

    let mut obj = String::from("# exported\n");
    for x in &v {
        obj.push_str(&format!("v {} {} {}\n", x[0], x[1], x[2]));
    }
    for t in &f {
        // Reverse winding and 1-based indices; orientation is recomputed.
        obj.push_str(&format!("f {} {}/1 {}//2\n", t[0] + 1, t[2] + 1, t[1] + 1));
    }
    let (v2, f2) = parse_obj(&obj).unwrap();
    let from_obj = mesh_from_triangles(&v2, &f2, &st()).unwrap();
    assert!(from_obj.normals().iter().zip(from_obj.vertices()).all(|(n, x)| n.dot(x) < 0.0));
    assert_eq!(chern_number(&tangent(&from_obj), &from_obj).unwrap(), 2);
}

#[test]
fn malformed_meshes_report_line_numbers() {
    match parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n") {
        Err(Error::MeshParse { line: 6, .. }) => {}
        other => panic!("{other:?}"),
    }
    match parse_off("PLY\n") {
        Err(Error::MeshParse { line: 1, .. }) => {}
        other => panic!("{other:?}"),
    }
    match parse_obj("v 0 0 0\nv 1 0 x\n") {
        Err(Error::MeshParse { line: 2, .. }) => {}
        other => panic!("{other:?}"),
    }
    // A single triangle is not closed.
    let (v, f) = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n").unwrap();
    assert!(matches!(mesh_from_triangles(&v, &f, &st()), Err(Error::InvalidInput(_))));
}

#[test]
fn surfaces_outside_an_associative_three_space_are_rejected() {
    let s = sphere(1, 1.0);
    assert!(matches!(s.embedded_in([axis(0), axis(1), axis(3)]), Err(Error::InvalidFrame(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_ellipsoids_give_symmetric_operators(a in 0.6f64..1.5, b in 0.6f64..1.5, c in 0.6f64..1.5) {
        let mesh = SurfaceMesh::ellipsoid(2, a, b, c, &st()).unwrap();
        let mats = assemble_dl(&mesh, &mu_e(&mesh), NormalDerivative::Ambient).unwrap();
        let r = check_trace_symmetry(&mats, &mean_curvature_field(&mesh).unwrap());
        prop_assert!(r.asymmetry <= 1e-8);
        prop_assert!(r.trace_residual <= 1e-7);
        // Convex: D_μ is positive.
        prop_assert!(mats.iter().all(|m| spectrum(m)[0] > 0.0));
    }

    #[test]
    fn chern_number_of_mu_is_minus_two_on_any_ellipsoid(a in 0.6f64..1.5, b in 0.6f64..1.5, c in 0.6f64..1.5, k in 3usize..7) {
        let mesh = SurfaceMesh::ellipsoid(2, a, b, c, &st()).unwrap();
        let mut e = [0.0; 7];
        e[k] = 1.0;
        let mu = bundle(&mesh, BundleSpec::Complement { basis: vec![e] });
        prop_assert_eq!(chern_number(&mu, &mesh).unwrap(), -2);
    }
}

#[test]
fn union_geometry_routes_off_surface_points_to_the_nearest_piece() {
    let strip = SurfaceMesh::strip_boundary(4, &st()).unwrap();
    let g = strip.geometry().unwrap();
    let near_far_side = axis(0) * 0.49 + axis(1) * 0.3;
    assert_eq!(g.inward_normal(&near_far_side), -axis(0));
    assert_eq!(g.inward_normal(&(axis(0) * 0.01)), axis(0));
}
