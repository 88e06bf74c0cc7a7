use assoc_core::g2::{assoc_residual, G2Structure, Plane};
use assoc_core::geometry::*;
use assoc_core::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn st() -> G2Structure<f64> {
    G2Structure::standard()
}

fn flat3() -> ImmersedPatch {
    ImmersedPatch::new(FlatChart { origin: V7::zeros(), directions: vec![axis(0), axis(1), axis(2)] }, st())
}

/// `ℝ × {w ↦ (w, w²)}`: a complex curve for `J = e₁×`, hence associative.
fn holomorphic_patch() -> ImmersedPatch {
    let chart = FnChart {
        dim: 3,
        f: |p: &[f64]| {
            let (x, u, v) = (p[0], p[1], p[2]);
            V7::from_column_slice(&[x, u, v, u * u - v * v, 2.0 * u * v, 0.0, 0.0])
        },
        diameter: 1.0,
    };
    ImmersedPatch::new(chart, st())
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

#[test]
fn flat_identity_chart_frame() {
    let f = adapted_frame(&flat3(), &[0.1, 0.2, 0.3]).unwrap();
    for i in 0..3 {
        assert!((f.tangent[i] - axis(i)).norm() < 1e-14);
    }
    for k in 0..4 {
        assert!((f.normal[k] - axis(k + 3)).norm() < 1e-14);
    }
}

#[test]
fn swapped_inputs_still_get_e3_as_cross_product() {
    let p = ImmersedPatch::new(FlatChart { origin: V7::zeros(), directions: vec![axis(1), axis(0), axis(2)] }, st());
    let f = adapted_frame(&p, &[0.0; 3]).unwrap();
    let e3 = cross(&st(), &f.tangent[0], &f.tangent[1]);
    assert!((f.tangent[2] - e3).norm() < 1e-14);
    assert!((f.tangent[2] + axis(2)).norm() < 1e-14);
    assert!(f.orthonormality_defect() < 1e-12);
}

#[test]
fn sphere_normal_is_radial() {
    let rho = 1.7;
    let p = ImmersedPatch::new(SphereChart::sphere(rho), st());
    for q in [[0.4, 0.3], [1.2, -2.0], [2.5, 1.1]] {
        let f = adapted_frame(&p, &q).unwrap();
        let x = p.position(&q);
        assert!((x.dot(&f.normal[0]).abs() - rho).abs() < 1e-12);
        // The remaining normals span e₄..e₇.
        for n in &f.normal[1..] {
            assert!(n.rows(0, 3).norm() < 1e-12);
        }
    }
}

#[test]
fn rank_drop_is_reported() {
    let chart = FnChart { dim: 2, f: |p: &[f64]| V7::from_column_slice(&[p[0], p[0] * p[0], 0.0, 0.0, 0.0, 0.0, 0.0]), diameter: 1.0 };
    let p = ImmersedPatch::new(chart, st());
    assert!(matches!(adapted_frame(&p, &[0.3, 0.1]), Err(Error::RankDeficient { .. })));
}

#[test]
fn flat_plane_is_totally_geodesic() {
    let p = flat3();
    let f = adapted_frame(&p, &[0.0; 3]).unwrap();
    let s = second_fundamental(&p, &[0.0; 3], &f);
    assert!(s.a.iter().all(|a| a.amax() < 1e-14));
    let ops = simons_operators_in_frame(&p, &[0.0; 3], &f, &FlatAmbient);
    assert!(ops.cal_a.amax() < 1e-8);
}

#[test]
fn sphere_principal_curvatures_inward() {
    let rho = 0.8;
    let patch = ImmersedPatch::new(SphereChart::sphere(rho), st());
    let q = [0.9, 0.4];
    let f = adapted_frame(&patch, &q).unwrap();
    let s = second_fundamental(&patch, &q, &f);
    let n = SphereChart::sphere(rho).inward_normal(&patch.position(&q));
    for k in s.principal_curvatures(&n) {
        assert!((k - 1.0 / rho).abs() < 1e-12);
    }
    assert!((s.mean_curvature_along(&n) - 1.0 / rho).abs() < 1e-12);
    assert!((s.mean_curvature_along(&-n) + 1.0 / rho).abs() < 1e-12);
}

/// Principal curvatures of the spheroid `(a sinθ cosφ, a sinθ sinφ, c cosθ)`
/// from the surface-of-revolution formulas (meridian, parallel).
fn spheroid_curvatures(a: f64, c: f64, theta: f64) -> (f64, f64) {
    let s = (a * a * theta.cos().powi(2) + c * c * theta.sin().powi(2)).sqrt();
    (a * c / s.powi(3), c / (a * s))
}

#[test]
fn ellipsoid_matches_closed_form() {
    let (a, c) = (1.0, 2.0);
    let chart = EllipsoidChart::new(a, a, c);
    let q = [0.7, 0.3];
    let n = chart.inward_normal(&chart.eval(&q));
    let (km, kp) = spheroid_curvatures(a, c, q[0]);
    assert!((km - kp).abs() > 0.1, "point should not be umbilic");
    let mut expected = [km, kp];
    expected.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let analytic = ImmersedPatch::new(chart.clone(), st());
    let f = adapted_frame(&analytic, &q).unwrap();
    let got = second_fundamental(&analytic, &q, &f).principal_curvatures(&n);
    for (g, e) in got.iter().zip(expected) {
        assert!((g - e).abs() < 1e-12, "{g} vs {e}");
    }

    // Finite differences only: error shrinks like h².
    let fd_err = |h: f64| {
        let ch = chart.clone();
        let p = ImmersedPatch::new(FnChart { dim: 2, f: move |x: &[f64]| ch.eval(x), diameter: 1.0 }, st());
        let t = p.tangent_vectors_fd(&q, h);
        let hs = p.second_derivatives_fd(&q, h);
        let tm = DMatrix::from_fn(7, 2, |i, k| t[k][i]);
        let g = tm.transpose() * &tm;
        let hn = DMatrix::from_fn(2, 2, |i, j| n.dot(&hs[i][j]));
        let w = g.clone().try_inverse().unwrap() * hn;
        let mut ev: Vec<f64> = w.complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ev.iter().zip(expected).map(|(g, e)| (g - e).abs()).fold(0.0, f64::max)
    };
    let (e1, e2) = (fd_err(1e-2), fd_err(5e-3));
    assert!(e1 < 1e-3);
    let ratio = e1 / e2;
    assert!((3.0..5.0).contains(&ratio), "convergence ratio {ratio}");
}

/// `⟨A(η)u, v⟩ = −⟨∂_u η, v⟩` with `η` extended by normal projection of a
/// fixed vector, differentiated by central differences.
#[test]
fn shape_operator_matches_normal_field_derivative() {
    let chart = EllipsoidChart::new(1.0, 1.5, 2.0);
    let patch = ImmersedPatch::new(chart.clone(), st());
    let q = [1.1, 0.6];
    let f = adapted_frame(&patch, &q).unwrap();
    let s = second_fundamental(&patch, &q, &f);
    let h = 1e-5;
    for (k, eta0) in f.normal.iter().enumerate() {
        let field = |p: &[f64]| {
            let t = patch.tangent_vectors(p);
            let mut basis: Vec<V7> = Vec::new();
            for v in &t {
                let mut w = *v;
                for b in &basis {
                    w -= b * b.dot(&w);
                }
                basis.push(w.normalize());
            }
            let mut w = *eta0;
            for b in &basis {
                w -= b * b.dot(eta0);
            }
            w.normalize()
        };
        for i in 0..2 {
            for j in 0..2 {
                // Directional derivative along e_i = Σ_a M_{ai} ∂_a.
                let m = &f.coordinate_map;
                let mut d = V7::zeros();
                for a in 0..2 {
                    let mut pp = q.to_vec();
                    let mut pm = q.to_vec();
                    pp[a] += h;
                    pm[a] -= h;
                    d += (field(&pp) - field(&pm)) / (2.0 * h) * m[(a, i)];
                }
                let oracle = -d.dot(&f.tangent[j]);
                assert!((s.a[k][(i, j)] - oracle).abs() < 1e-7, "k={k} ({i},{j})");
            }
        }
    }
}

#[test]
fn flat_ambient_gives_minus_cal_a() {
    let patch = ImmersedPatch::new(EllipsoidChart::new(1.0, 1.0, 2.0), st());
    let ops = simons_operators(&patch, &[0.5, 0.2], &FlatAmbient).unwrap();
    assert!(ops.cal_r.amax() < 1e-14);
    assert!((&ops.cal_r_nu + &ops.cal_a).amax() < 1e-14);
}

#[test]
fn constant_curvature_ambient() {
    let kappa = 0.37;
    for patch in [flat3(), holomorphic_patch(), ImmersedPatch::new(SphereChart::sphere(1.3), st())] {
        let pdim = patch.dim() as f64;
        let q: Vec<f64> = vec![0.3; patch.dim()];
        let ops = simons_operators(&patch, &q, &ConstantCurvature { kappa }).unwrap();
        let expect = DMatrix::identity(7 - patch.dim(), 7 - patch.dim()) * (-pdim * kappa);
        assert!((&ops.cal_r - expect).amax() < 1e-8);
        assert!((&ops.cal_r - ops.cal_r.transpose()).amax() < 1e-8);
    }
}

#[test]
fn holomorphic_patch_is_associative_and_minimal() {
    let patch = holomorphic_patch();
    for q in [[0.0, 0.2, -0.1], [0.5, 0.35, 0.25], [-0.3, -0.4, 0.1]] {
        let f = adapted_frame(&patch, &q).unwrap();
        let basis: Vec<[f64; 7]> = f.tangent.iter().map(to_arr).collect();
        let plane = Plane::new(basis, &st()).unwrap();
        assert!(assoc_residual(&plane, &st()) < 1e-10);
        assert!((f.tangent[2] - cross(&st(), &f.tangent[0], &f.tangent[1])).norm() < 1e-10);
        let s = second_fundamental(&patch, &q, &f);
        assert!(s.a.iter().any(|a| a.amax() > 0.1), "patch is curved");
        for a in &s.a {
            assert!(a.trace().abs() < 1e-5, "trace {}", a.trace());
        }
    }
}

#[test]
fn operators_are_frame_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let amb = ConstantCurvature { kappa: -0.8 };
    for patch in [holomorphic_patch(), ImmersedPatch::new(EllipsoidChart::new(1.0, 1.5, 2.0), st())] {
        let q: Vec<f64> = vec![0.6; patch.dim()];
        let f = adapted_frame(&patch, &q).unwrap();
        let base = simons_operators_in_frame(&patch, &q, &f, &amb);
        for _ in 0..5 {
            let rt = random_orthogonal(patch.dim(), &mut rng);
            let rn = random_orthogonal(7 - patch.dim(), &mut rng);
            let g = f.rotated(&rt, &rn);
            assert!(g.orthonormality_defect() < 1e-12);
            let rot = simons_operators_in_frame(&patch, &q, &g, &amb);
            let back = |m: &DMatrix<f64>| rn.transpose() * m * &rn;
            assert!((back(&base.cal_a) - &rot.cal_a).amax() < 1e-8);
            assert!((back(&base.cal_r) - &rot.cal_r).amax() < 1e-8);
        }
    }
}

#[test]
fn cross_product_leibniz_rule_along_patch() {
    let chart = EllipsoidChart::new(1.0, 1.5, 2.0);
    let patch = ImmersedPatch::new(chart, st());
    let s = st();
    let q = [0.8, 0.4];
    let uv = |p: &[f64]| {
        let t = patch.tangent_vectors(p);
        cross(&s, &t[0], &t[1])
    };
    let t = patch.tangent_vectors(&q);
    let hs = patch.second_derivatives(&q);
    for a in 0..2 {
        let exact = cross(&s, &hs[a][0], &t[1]) + cross(&s, &t[0], &hs[a][1]);
        let err = |h: f64| {
            let mut pp = q.to_vec();
            let mut pm = q.to_vec();
            pp[a] += h;
            pm[a] -= h;
            ((uv(&pp) - uv(&pm)) / (2.0 * h) - exact).norm()
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        assert!(e1 < 1e-3);
        assert!((3.5..4.5).contains(&(e1 / e2)));
    }
}

#[test]
fn rigidity_verdicts() {
    let torus = ChartSpec::Torus { offset: None, axes: vec![1, 2, 3] }.build(st()).unwrap();
    let pts: Vec<Vec<f64>> = (0..4).map(|i| vec![0.25 * i as f64; 3]).collect();
    let frames = adapted_frames(&torus, &pts).unwrap();
    let ops: Vec<_> = pts.iter().zip(&frames).map(|(p, f)| simons_operators_in_frame(&torus, p, f, &FlatAmbient)).collect();
    let r = rigidity_check(&ops, 1e-10);
    assert_eq!(r.verdict, Verdict::Nonpositive);
    assert_eq!(r.min_eigenvalue, 0.0);

    let s = 2.5;
    let synth = vec![CurvatureOperators::synthetic(DMatrix::identity(4, 4) * (s / 4.0))];
    let r = rigidity_check(&synth, 1e-10);
    assert_eq!(r.verdict, Verdict::Positive);
    assert!((r.min_eigenvalue - s / 4.0).abs() < 1e-14);

    let mixed = vec![CurvatureOperators::synthetic(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, 0.5, 0.5])))];
    assert_eq!(rigidity_check(&mixed, 1e-10).verdict, Verdict::Indefinite);
}

#[test]
fn frames_are_order_independent() {
    let patch = ImmersedPatch::new(EllipsoidChart::new(1.0, 1.5, 2.0), st());
    let pts: Vec<Vec<f64>> = (0..32).map(|i| vec![0.2 + 0.08 * i as f64, -1.0 + 0.1 * i as f64]).collect();
    let fwd = adapted_frames(&patch, &pts).unwrap();
    let rev_pts: Vec<Vec<f64>> = pts.iter().rev().cloned().collect();
    let rev = adapted_frames(&patch, &rev_pts).unwrap();
    for (a, b) in fwd.iter().zip(rev.iter().rev()) {
        assert_eq!(a.tangent, b.tangent);
        assert_eq!(a.normal, b.normal);
    }
}

#[test]
fn chart_spec_json_round_trip() {
    let src = r#"{"type":"ellipsoid","params":{"a":1.0,"b":1.0,"c":2.0}}"#;
    let spec: ChartSpec = serde_json::from_str(src).unwrap();
    assert_eq!(spec, ChartSpec::Ellipsoid { a: 1.0, b: 1.0, c: 2.0 });
    assert_eq!(spec.build(st()).unwrap().dim(), 2);
    let bad: ChartSpec = serde_json::from_str(r#"{"type":"sphere","params":{"radius":-1.0}}"#).unwrap();
    assert!(bad.build(st()).is_err());
}

proptest! {
    #[test]
    fn frames_orthonormal_and_cal_a_psd(t in 0.2f64..2.9, f in -3.0f64..3.0, a in 0.5f64..2.0, b in 0.5f64..2.0, c in 0.5f64..2.0) {
        let patch = ImmersedPatch::new(EllipsoidChart::new(a, b, c), st());
        let fr = adapted_frame(&patch, &[t, f]).unwrap();
        prop_assert!(fr.orthonormality_defect() < 1e-10);
        let ops = simons_operators_in_frame(&patch, &[t, f], &fr, &FlatAmbient);
        prop_assert!((&ops.cal_a - ops.cal_a.transpose()).amax() < 1e-8);
        let ev = ops.cal_a.clone().symmetric_eigen().eigenvalues;
        prop_assert!(ev.min() >= -1e-10);
        prop_assert!((&ops.cal_r_nu + &ops.cal_a).amax() < 1e-14);
    }

    #[test]
    fn associative_minimality_everywhere(x in -1.0f64..1.0, u in -0.6f64..0.6, v in -0.6f64..0.6) {
        let patch = holomorphic_patch();
        let fr = adapted_frame(&patch, &[x, u, v]).unwrap();
        let s = second_fundamental(&patch, &[x, u, v], &fr);
        for a in &s.a {
            prop_assert!(a.trace().abs() < 1e-5);
        }
    }
}
