use assoc_core::dirac::*;
use assoc_core::g2::G2Structure;
use assoc_core::geometry::{axis, cross, V7};
use assoc_core::Error;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const TOL: f64 = KERNEL_TOLERANCE;

fn st() -> G2Structure<f64> {
    G2Structure::standard()
}

fn torus_op(n: usize) -> DiscreteDiracOperator {
    assemble_dirac(GridDomain::torus(n).unwrap(), &st(), &FiberFrame::standard()).unwrap()
}

fn strip_op(n1: usize, n: usize) -> DiscreteDiracOperator {
    assemble_dirac(GridDomain::strip(n1, n, n).unwrap(), &st(), &FiberFrame::standard()).unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(C_i)_{kl} = ⟨e_{k+4}, e_i × e_{l+4}⟩` straight from the cross product.
fn oracle_cross_matrices() -> Vec<DMatrix<f64>> {
    (0..3).map(|i| DMatrix::from_fn(4, 4, |k, l| axis(k + 3).dot(&cross(&st(), &axis(i), &axis(l + 3))))).collect()
}

#[test]
fn symbol_squares_to_minus_xi_squared() {
    let op = torus_op(16);
    for k in GridDomain::torus(16).unwrap().block_frequencies() {
        let xi = k.map(|v| 2.0 * PI * v as f64);
        let s = op.symbol(xi);
        let n2: f64 = xi.iter().map(|x| x * x).sum();
        let r = &s * &s + DMatrix::identity(4, 4) * n2;
        assert!(r.amax() <= 1e-12 * n2.max(1.0), "k={k:?}");
        // The Fourier block is i·σ(ξ).
        let b = op.block(k);
        assert!((b - s.map(|v| Complex64::new(0.0, v))).camax() < 1e-12 * n2.sqrt().max(1.0));
    }
    assert_eq!(op.block([0, 0, 0]).camax(), 0.0);
}

#[test]
fn dirac_of_sine_section() {
    let op = torus_op(16);
    let s = GridSection::from_real_fn(*op.domain(), 4, |x| vec![(2.0 * PI * x[0]).sin(), 0.0, 0.0, 0.0]);
    let ds = op.apply(&s);
    let expect = GridSection::from_real_fn(*op.domain(), 4, |x| vec![0.0, 2.0 * PI * (2.0 * PI * x[0]).cos(), 0.0, 0.0]);
    assert!(ds.sub(&expect).max_abs() < 1e-12);
}

#[test]
fn spectral_and_finite_difference_derivatives() {
    let d = GridDomain::strip(64, 8, 8).unwrap();
    let s = GridSection::from_real_fn(d, 1, |x| vec![(2.0 * PI * 3.0 * x[1]).sin() * (2.0 * PI * x[0]).cos()]);
    let ds = s.derivative(1);
    let e = GridSection::from_real_fn(d, 1, |x| vec![6.0 * PI * (6.0 * PI * x[1]).cos() * (2.0 * PI * x[0]).cos()]);
    assert!(ds.sub(&e).max_abs() < 1e-11);
    let err = |n1: usize| {
        let d = GridDomain::strip(n1, 4, 4).unwrap();
        let s = GridSection::from_real_fn(d, 1, |x| vec![(3.0 * x[0]).exp()]);
        let e = GridSection::from_real_fn(d, 1, |x| vec![3.0 * (3.0 * x[0]).exp()]);
        s.derivative(0).sub(&e).max_abs()
    };
    let rate = (err(16) / err(32)).log2();
    assert!(rate > 1.9, "rate {rate}");
}

#[test]
fn frame_and_line_validation() {
    let f = FiberFrame::standard();
    let bad = FiberFrame { tangent: [f.tangent[0], f.tangent[1], -f.tangent[2]], normal: f.normal };
    assert!(matches!(assemble_dirac(GridDomain::torus(8).unwrap(), &st(), &bad), Err(Error::InvalidFrame(_))));

    let op = strip_op(8, 8);
    assert!(constrain(&op, &BoundaryCondition::nu_x()).is_ok());
    assert!(constrain(&op, &BoundaryCondition::mu_x()).is_ok());
    let e4e6 = BoundaryCondition::new(&[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]], LineTag::Custom).unwrap();
    assert!(matches!(constrain(&op, &e4e6), Err(Error::NotComplexLine { .. })));
    assert!(constrain(&torus_op(8), &BoundaryCondition::nu_x()).is_err());
}

#[test]
fn cross_matrices_match_table() {
    let lib = FiberFrame::standard().cross_matrices(&st());
    for (a, b) in lib.iter().zip(oracle_cross_matrices()) {
        assert_eq!(a, &b);
    }
    // ∂₁ × e₄ = e₅ and ∂₁ × e₆ = e₇.
    assert_eq!(lib[0][(1, 0)], 1.0);
    assert_eq!(lib[0][(3, 2)], 1.0);
}

#[test]
fn closed_torus_kernel_is_constants() {
    let op = torus_op(16);
    let r = kernel_dims(&op, TOL).unwrap();
    assert_eq!(r.dim_ker, 4);
    assert_eq!(r.dim_coker, 4);
    assert_eq!(r.index, 0);
    let smax = *r.singular_values.last().unwrap();
    assert!(r.singular_values[..4].iter().all(|s| *s < 1e-12 * smax));
    assert!(r.singular_values[4] >= 2.0 * PI * (1.0 - 1e-10));
    assert!(r.gap_ratio >= MIN_GAP && r.converged);
    for s in kernel_sections(&op, TOL).unwrap() {
        let v0 = s.at(0).to_vec();
        for node in 0..op.domain().len() {
            for (a, b) in s.at(node).iter().zip(&v0) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}

/// `exp(A)` by scaling and squaring of a Taylor series.
fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let squarings = norm.log2().ceil().max(0.0) as i32 + 1;
    let b = a.map(|z| z / 2f64.powi(squarings));
    let n = a.nrows();
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &b / c(k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Kernel dimension of `C₁ s' + 2πi(k₂C₂ + k₃C₃) s = 0` on `[0, ½]` with
/// `s ∈ L` at both ends, from the exact propagator.
fn ode_kernel_dim(k2: i64, k3: i64, line: &[usize; 2]) -> usize {
    let cm = oracle_cross_matrices();
    let cm: Vec<DMatrix<Complex64>> = cm.iter().map(|m| m.map(c)).collect();
    let k = &cm[1] * c(k2 as f64) + &cm[2] * c(k3 as f64);
    let m = &cm[0] * k * Complex64::new(0.0, 2.0 * PI);
    let prop = expm(&(m * c(0.5)));
    let perp: Vec<usize> = (0..4).filter(|i| !line.contains(i)).collect();
    let mut rows = DMatrix::<Complex64>::zeros(4, 4);
    for (r, &p) in perp.iter().enumerate() {
        rows[(r, p)] = c(1.0);
        let row = prop.row(p);
        let n = row.norm();
        rows.row_mut(2 + r).copy_from(&row.map(|z| z / n));
    }
    let sv = rows.singular_values();
    sv.iter().filter(|s| **s < 1e-9).count()
}

#[test]
fn strip_ode_oracle() {
    let mut total_nu = 0;
    let mut total_mu = 0;
    for k2 in -7..=8 {
        for k3 in -7..=8 {
            let nu = ode_kernel_dim(k2, k3, &[0, 1]);
            let mu = ode_kernel_dim(k2, k3, &[2, 3]);
            if (k2, k3) == (0, 0) {
                assert_eq!((nu, mu), (2, 2));
            } else {
                assert_eq!((nu, mu), (0, 0), "k=({k2},{k3})");
            }
            total_nu += nu;
            total_mu += mu;
        }
    }
    assert_eq!((total_nu, total_mu), (2, 2));
}

#[test]
fn strip_kernel_and_duality() {
    for n1 in [8, 16] {
        let op = strip_op(n1, 8);
        let nu = kernel_dims(&constrain(&op, &BoundaryCondition::nu_x()).unwrap(), TOL).unwrap();
        let mu = kernel_dims(&constrain(&op, &BoundaryCondition::mu_x()).unwrap(), TOL).unwrap();
        assert_eq!((nu.dim_ker, nu.dim_coker, nu.index), (2, 2, 0), "n1={n1} gap={}", nu.gap_ratio);
        assert_eq!(mu.dim_ker, 2);
        assert_eq!(nu.dim_coker, mu.dim_ker);
        assert!(nu.converged && mu.converged, "gaps {} {}", nu.gap_ratio, mu.gap_ratio);
    }
}

#[test]
fn block_matches_physical_application() {
    let op = strip_op(8, 8);
    let d = *op.domain();
    let (k2, k3) = (2i64, -3i64);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let prof: Vec<Complex64> = (0..9 * 4).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let s = GridSection::from_fn(d, 4, |x| {
        let j = (x[0] / d.spacing(0)).round() as usize;
        let w = Complex64::from_polar(1.0, 2.0 * PI * (k2 as f64 * x[1] + k3 as f64 * x[2]));
        prof[j * 4..j * 4 + 4].iter().map(|z| z * w).collect()
    });
    let phys = op.apply(&s);
    let blk = op.block([0, k2, k3]) * DVector::from_vec(prof);
    for node in 0..d.len() {
        let x = d.point(node);
        let j = d.unravel(node)[0];
        let w = Complex64::from_polar(1.0, 2.0 * PI * (k2 as f64 * x[1] + k3 as f64 * x[2]));
        for a in 0..4 {
            assert!((phys.at(node)[a] - blk[j * 4 + a] * w).norm() < 1e-11);
        }
    }
}

#[test]
fn nonlinear_residual_basics() {
    let op = torus_op(8);
    let d = *op.domain();
    let zero = GridSection::zeros(d, 4);
    assert_eq!(nonlinear_residual(&op, &zero).unwrap().max_abs(), 0.0);
    let constant = GridSection::from_real_fn(d, 4, |_| vec![0.7, 0.0, 0.0, 0.0]);
    assert!(nonlinear_residual(&op, &constant).unwrap().max_abs() < 1e-15);
    // A fold: ∂₁σ = −e₁ collapses the first tangent vector onto the normal space.
    let steep = GridSection::from_real_fn(d, 4, |x| vec![10.0 * (2.0 * PI * x[0]).sin(), 0.0, 0.0, 0.0]);
    let r = nonlinear_residual(&op, &steep);
    assert!(r.is_ok(), "tilted graphs stay immersed");
    assert!(nonlinear_residual(&assemble_dvee(d).unwrap(), &zero).is_err());
}

#[test]
fn linearization_matches_dirac() {
    for op in [torus_op(8), strip_op(8, 8)] {
        let d = *op.domain();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = 1e-5;
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let vals: Vec<Complex64> = (0..d.len() * 4).map(|_| c(rng.gen_range(-1.0..1.0))).collect();
            let sigma = GridSection::from_values(d, 4, vals).unwrap();
            let fp = nonlinear_residual(&op, &sigma.scale(t)).unwrap();
            let fm = nonlinear_residual(&op, &sigma.scale(-t)).unwrap();
            let fd = fp.sub(&fm).scale(0.5 / t);
            let ds = op.apply(&sigma).real_part();
            worst = worst.max(fd.sub(&ds).norm() / ds.norm());
        }
        assert!(worst < 1e-6, "{worst}");
    }
}

#[test]
fn weitzenbock_fourier_and_fd() {
    let w = weitzenbock_residual(&torus_op(16), None, 5, 1);
    assert!(w < 1e-12, "{w}");
    let r: Vec<f64> = [8, 16, 32].iter().map(|&n| weitzenbock_residual(&strip_op(n, 8), None, 4, 2)).collect();
    let rates = [(r[0] / r[1]).log2(), (r[1] / r[2]).log2()];
    assert!(rates.iter().all(|q| *q >= 1.9), "{r:?} {rates:?}");
    let k = DMatrix::identity(4, 4) * 0.3;
    let op = torus_op(8).with_zero_order(DMatrix::zeros(4, 4)).unwrap();
    assert!(weitzenbock_residual(&op, Some(&k), 2, 3) > 0.1, "a wrong curvature term is detected");
}

/// A second section sharing the frequencies of `s`, so pairings are nonzero.
fn overlapping(s: &GridSection, op: &DiscreteDiracOperator, rng: &mut ChaCha8Rng) -> GridSection {
    let m = DMatrix::from_fn(4, 4, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    s.map_fiber(&m).combine(c(1.0), &random_section(op, rng), c(1.0))
}

#[test]
fn selfadjointness_with_boundary_term() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let op8 = strip_op(8, 8);
    let s = random_section(&op8, &mut rng);
    assert!(boundary_pairing(&op8, &s, &s).re.abs() < 1e-14);
    let res: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let op = strip_op(n, 8);
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let s = random_section(&op, &mut rng);
            let t = overlapping(&s, &op, &mut rng);
            selfadjoint_residual(&op, &s, &t)
        })
        .collect();
    let rates = [(res[0] / res[1]).log2(), (res[1] / res[2]).log2()];
    assert!(rates.iter().all(|q| *q >= 1.9), "{res:?}");

    let op = strip_op(16, 8);
    let s = random_section(&op, &mut rng);
    let t = overlapping(&s, &op, &mut rng);
    assert!((op.apply(&s).inner(&t) - s.inner(&op.apply(&t))).norm() > 1e-3, "the boundary term is needed");
    let cut = |x: &GridSection| {
        let mut y = x.clone();
        for node in 0..op.domain().len() {
            let j = op.domain().unravel(node)[0];
            if j < 2 || j > 14 {
                y.at_mut(node).iter_mut().for_each(|z| *z = c(0.0));
            }
        }
        y
    };
    assert!(selfadjoint_residual(&op, &cut(&s), &cut(&t)) < 1e-10);
}

#[test]
fn bochner_on_kernel_and_perturbed_elements() {
    let mu = constrain(&strip_op(8, 8), &BoundaryCondition::mu_x()).unwrap();
    let ker = kernel_sections(&mu, TOL).unwrap();
    assert_eq!(ker.len(), 2);
    for s in &ker {
        let b = bochner_terms(&mu, s, None).unwrap();
        assert!(b.gradient.abs() <= 1e-10 && b.curvature.abs() <= 1e-10 && b.boundary.abs() <= 1e-10, "{b:?}");
    }
    // s₀ + h·p with p|∂ ∈ μ_X.
    let p = |x: [f64; 3]| {
        let a = (2.0 * PI * x[0]).sin();
        vec![a * (2.0 * PI * x[1]).cos(), a * (2.0 * PI * x[2]).sin(), 1.0 + 0.5 * (2.0 * PI * x[1]).sin(), (2.0 * PI * (x[1] + x[2])).cos()]
    };
    let mut totals = Vec::new();
    let mut defects = Vec::new();
    for n1 in [8, 16, 32] {
        let op = constrain(&strip_op(n1, 8), &BoundaryCondition::mu_x()).unwrap();
        let h = op.domain().spacing(0);
        let s = GridSection::from_real_fn(*op.domain(), 4, |x| p(x).iter().map(|v| v * h).collect());
        totals.push(bochner_terms(&op, &s, None).unwrap().total);
        let full = GridSection::from_real_fn(*op.domain(), 4, p);
        defects.push(bochner_terms(&op, &full, None).unwrap().defect.abs());
    }
    for w in totals.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.0, "{totals:?}");
    }
    // With boundary values in the line, the integrated identity holds exactly on the grid.
    assert!(defects.iter().all(|d| *d < 1e-10), "{defects:?}");
}

#[test]
fn bochner_rejects_sections_off_the_line() {
    let mu = constrain(&strip_op(8, 8), &BoundaryCondition::mu_x()).unwrap();
    let s = GridSection::from_real_fn(*mu.domain(), 4, |_| vec![1.0, 0.0, 0.0, 0.0]);
    assert!(bochner_terms(&mu, &s, None).is_err());
}

/// `(−curl α − ∇τ, div α)` from component derivatives.
fn dvee_by_vector_calculus(u: &GridSection) -> GridSection {
    let d: Vec<GridSection> = (0..3).map(|j| u.derivative(j)).collect();
    let mut out = GridSection::zeros(*u.domain(), 4);
    for node in 0..u.domain().len() {
        let g = |j: usize, comp: usize| d[j].at(node)[comp];
        let curl = [g(1, 2) - g(2, 1), g(2, 0) - g(0, 2), g(0, 1) - g(1, 0)];
        let o = out.at_mut(node);
        for i in 0..3 {
            o[i] = -curl[i] - g(i, 3);
        }
        o[3] = g(0, 0) + g(1, 1) + g(2, 2);
    }
    out
}

#[test]
fn dvee_matches_formula_and_g2_block() {
    let op = assemble_dvee(GridDomain::torus(8).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let u = random_section(&op, &mut rng);
        let r = op.apply(&u).sub(&dvee_by_vector_calculus(&u)).norm() / u.norm();
        assert!(r < 1e-12, "{r}");
    }
    let g2 = assemble_dirac(GridDomain::torus(8).unwrap(), &st(), &special_lagrangian_frame()).unwrap();
    for (a, b) in op.coefficients().iter().zip(g2.coefficients()) {
        assert_eq!(a, b);
    }
}

#[test]
fn dvee_square_and_kernels() {
    let op = assemble_dvee(GridDomain::torus(16).unwrap()).unwrap();
    let r = dvee_square_residual(&op, 3, 4);
    assert!(r < 1e-12, "{r}");
    let rep = kernel_dims(&op, TOL).unwrap();
    assert_eq!((rep.dim_ker, rep.index), (4, 0));
    for s in kernel_sections(&op, TOL).unwrap() {
        let d: Vec<GridSection> = (0..3).map(|j| s.derivative(j)).collect();
        for node in 0..op.domain().len() {
            for j in 0..3 {
                // τ constant, α closed and coclosed (here: constant).
                assert!(d[j].at(node).iter().all(|z| z.norm() < 1e-10));
            }
        }
    }
    let pert = perturbed_dvee(&op, 0.05, 1.0).unwrap();
    let rep = kernel_dims(&pert, TOL).unwrap();
    assert_eq!(rep.dim_ker, 3);
    for s in kernel_sections(&pert, TOL).unwrap() {
        assert!(s.values().iter().skip(3).step_by(4).all(|z| z.norm() < 1e-12), "τ is expelled");
    }
}

/// Fourier oracle for the perturbed blocks: `det(iS(ξ) + aλE₄₄)` vanishes
/// only at `ξ = 0`.
#[test]
fn perturbed_dvee_fourier_oracle() {
    let (lambda, a) = (0.05, 1.0);
    let mut zero_blocks = 0;
    for k1 in -3i64..=4 {
        for k2 in -3i64..=4 {
            for k3 in -3i64..=4 {
                let xi = [k1, k2, k3].map(|v| 2.0 * PI * v as f64);
                let mut m = dvee_symbol(xi).map(|v| Complex64::new(0.0, v));
                m[(3, 3)] += a * lambda;
                let sv = m.singular_values();
                let nullity = sv.iter().filter(|s| **s < 1e-12).count();
                if nullity > 0 {
                    zero_blocks += 1;
                    assert_eq!([k1, k2, k3], [0, 0, 0]);
                    assert_eq!(nullity, 3);
                }
            }
        }
    }
    assert_eq!(zero_blocks, 1);
    let _ = V7::zeros();
}
