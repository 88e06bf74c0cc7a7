//! Measurements shared by the catalog examples and the acceptance harness.

use assoc_core::dirac::{
    assemble_dirac, assemble_dvee, bochner_terms, constrain, dvee_symbol, kernel_sections, nonlinear_residual,
    random_section, rough_laplacian, selfadjoint_residual, special_lagrangian_frame, BoundaryCondition,
    DiscreteDiracOperator, FiberFrame, GridDomain, GridSection,
};
use assoc_core::g2::G2Structure;
use assoc_core::geometry::{axis, cross};
use assoc_core::Result;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn torus_dirac(n: usize) -> Result<DiscreteDiracOperator> {
    assemble_dirac(GridDomain::torus(n)?, &G2Structure::standard(), &FiberFrame::standard())
}

/// Strip `[0, ½] × T²` with `n1` intervals across and `n` nodes per period.
pub fn strip_dirac(n1: usize, n: usize) -> Result<DiscreteDiracOperator> {
    assemble_dirac(GridDomain::strip(n1, n, n)?, &G2Structure::standard(), &FiberFrame::standard())
}

/// Residuals at successive resolution doublings and the observed orders.
#[derive(Clone, Debug, PartialEq)]
pub struct Rates {
    pub residuals: Vec<f64>,
    pub orders: Vec<f64>,
}

impl Rates {
    pub fn from_doublings(residuals: Vec<f64>) -> Self {
        let orders = residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        Self { residuals, orders }
    }

    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Largest pointwise deviation of kernel sections from their value at the first node.
pub fn kernel_constancy(op: &DiscreteDiracOperator, tol: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in kernel_sections(op, tol)? {
        let v0 = s.at(0).to_vec();
        for node in 0..op.domain().len() {
            for (a, b) in s.at(node).iter().zip(&v0) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    Ok(worst)
}

/// Worst relative gap between the central difference of the nonlinear
/// residual at 0 and `Dσ`, over random real directions.
pub fn linearization_error(op: &DiscreteDiracOperator, directions: usize, seed: u64) -> Result<f64> {
    let d = *op.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..directions {
        let vals: Vec<Complex64> = (0..d.len() * op.fiber_dim()).map(|_| c(rng.gen_range(-1.0..1.0))).collect();
        let sigma = GridSection::from_values(d, op.fiber_dim(), vals)?;
        let fp = nonlinear_residual(op, &sigma.scale(t))?;
        let fm = nonlinear_residual(op, &sigma.scale(-t))?;
        let fd = fp.sub(&fm).scale(0.5 / t);
        let ds = op.apply(&sigma).real_part();
        worst = worst.max(fd.sub(&ds).norm() / ds.norm());
    }
    Ok(worst)
}

/// Sections drawn per refinement study.
pub const STUDY_SAMPLES: usize = 4;

/// Smooth strip section whose bandwidth does not depend on the grid: modes
/// `|k₂|, |k₃| ≤ 1` times profiles `cos(2πm x₁ + φ)` with `m < 1`, so that
/// `hω` stays below 0.4 already at `n₁ = 8`.
pub fn smooth_strip_section(domain: GridDomain, fiber: usize, rng: &mut ChaCha8Rng) -> GridSection {
    let terms: Vec<(Vec<Complex64>, [f64; 2], f64, f64)> = (0..4)
        .map(|_| {
            let amp = (0..fiber).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let k = [rng.gen_range(-1..=1) as f64, rng.gen_range(-1..=1) as f64];
            (amp, k, rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI))
        })
        .collect();
    GridSection::from_fn(domain, fiber, |x| {
        let mut v = vec![c(0.0); fiber];
        for (amp, k, m, ph) in &terms {
            let w = Complex64::from_polar(1.0, 2.0 * PI * (k[0] * x[1] + k[1] * x[2])) * (2.0 * PI * m * x[0] + ph).cos();
            for (z, a) in v.iter_mut().zip(amp) {
                *z += a * w;
            }
        }
        v
    })
}

/// The region `x₁ ∈ [⅛, ⅜]`: at least two steps from both ends for every
/// `n₁ ≥ 8`, so `D∘D` uses central differences only, and the same region at
/// every level of a refinement study.
pub const INTERIOR: [f64; 2] = [0.125, 0.375];

/// Trapezoid norm over [`INTERIOR`].
fn interior_norm(s: &GridSection) -> f64 {
    let d = s.domain();
    let h = d.spacing(0);
    let mut acc = 0.0;
    for node in 0..d.len() {
        let x = d.point(node)[0];
        if x < INTERIOR[0] - 1e-9 * h || x > INTERIOR[1] + 1e-9 * h {
            continue;
        }
        let end = (x - INTERIOR[0]).abs() < 1e-9 * h || (x - INTERIOR[1]).abs() < 1e-9 * h;
        let w = h * d.spacing(1) * d.spacing(2) * if end { 0.5 } else { 1.0 };
        acc += w * s.at(node).iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    acc.sqrt()
}

/// `‖D²s − ∇*∇s‖ / ‖s‖` over [`INTERIOR`] at each `n₁`,
/// maximised over the same smooth sections at every level.
pub fn weitzenbock_fd_rates(resolutions: &[usize], n: usize, seed: u64) -> Result<Rates> {
    let r = resolutions
        .iter()
        .map(|&n1| {
            let op = strip_dirac(n1, n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst: f64 = 0.0;
            for _ in 0..STUDY_SAMPLES {
                let s = smooth_strip_section(*op.domain(), op.fiber_dim(), &mut rng);
                let r = op.apply(&op.apply(&s)).sub(&rough_laplacian(&s));
                worst = worst.max(interior_norm(&r) / interior_norm(&s));
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Rates::from_doublings(r))
}

/// A second section sharing the frequencies of `s`, so pairings are nonzero.
fn overlapping(s: &GridSection, rng: &mut ChaCha8Rng) -> GridSection {
    let f = s.fiber();
    let m = DMatrix::from_fn(f, f, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    s.map_fiber(&m).combine(c(1.0), &smooth_strip_section(*s.domain(), f, rng), c(1.0))
}

fn section_pairs(op: &DiscreteDiracOperator, seed: u64) -> Vec<(GridSection, GridSection)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..STUDY_SAMPLES)
        .map(|_| {
            let s = smooth_strip_section(*op.domain(), op.fiber_dim(), &mut rng);
            let t = overlapping(&s, &mut rng);
            (s, t)
        })
        .collect()
}

/// Boundary-corrected symmetry residual of the difference scheme, maximised
/// over section pairs; one pair alone can have a vanishing leading term.
pub fn selfadjoint_rates(resolutions: &[usize], n: usize, seed: u64) -> Result<Rates> {
    let r = resolutions
        .iter()
        .map(|&n1| {
            let op = strip_dirac(n1, n)?;
            Ok(section_pairs(&op, seed).iter().map(|(s, t)| selfadjoint_residual(&op, s, t)).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Rates::from_doublings(r))
}

/// Symmetry residual for sections vanishing within two nodes of the boundary.
pub fn selfadjoint_interior(n1: usize, n: usize, seed: u64) -> Result<f64> {
    let op = strip_dirac(n1, n)?;
    let cut = |x: &GridSection| {
        let mut y = x.clone();
        for node in 0..op.domain().len() {
            let j = op.domain().unravel(node)[0];
            if j < 2 || j + 2 > n1 {
                y.at_mut(node).iter_mut().for_each(|z| *z = c(0.0));
            }
        }
        y
    };
    Ok(section_pairs(&op, seed).iter().map(|(s, t)| selfadjoint_residual(&op, &cut(s), &cut(t))).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BochnerSummary {
    /// Largest of the three integral terms over kernel elements of `(D, μ_X)`.
    pub kernel_max_term: f64,
    pub kernel_count: usize,
    /// Bochner sums of `s₀ + h·p` under refinement.
    pub perturbed: Rates,
    /// Largest defect of the extended identity for sections with values in `μ_X` on the boundary.
    pub identity_defect: f64,
}

pub fn bochner_summary(resolutions: &[usize], n: usize, tol: f64) -> Result<BochnerSummary> {
    let mu = constrain(&strip_dirac(resolutions[0], n)?, &BoundaryCondition::mu_x())?;
    let ker = kernel_sections(&mu, tol)?;
    let mut kernel_max_term: f64 = 0.0;
    for s in &ker {
        let b = bochner_terms(&mu, s, None)?;
        kernel_max_term = kernel_max_term.max(b.gradient.abs()).max(b.curvature.abs()).max(b.boundary.abs());
    }
    // p has boundary values in μ_X = span of fibre coordinates 2, 3.
    let p = |x: [f64; 3]| {
        let a = (2.0 * PI * x[0]).sin();
        vec![a * (2.0 * PI * x[1]).cos(), a * (2.0 * PI * x[2]).sin(), 1.0 + 0.5 * (2.0 * PI * x[1]).sin(), (2.0 * PI * (x[1] + x[2])).cos()]
    };
    let mut totals = Vec::new();
    let mut identity_defect: f64 = 0.0;
    for &n1 in resolutions {
        let op = constrain(&strip_dirac(n1, n)?, &BoundaryCondition::mu_x())?;
        let h = op.domain().spacing(0);
        let s = GridSection::from_real_fn(*op.domain(), 4, |x| p(x).iter().map(|v| v * h).collect());
        totals.push(bochner_terms(&op, &s, None)?.total);
        let full = GridSection::from_real_fn(*op.domain(), 4, p);
        identity_defect = identity_defect.max(bochner_terms(&op, &full, None)?.defect.abs());
    }
    Ok(BochnerSummary { kernel_max_term, kernel_count: ker.len(), perturbed: Rates::from_doublings(totals), identity_defect })
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

/// Worst relative difference between `D^∨` and its vector-calculus form.
pub fn dvee_formula_error(n: usize, samples: usize, seed: u64) -> Result<f64> {
    let op = assemble_dvee(GridDomain::torus(n)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let u = random_section(&op, &mut rng);
        worst = worst.max(op.apply(&u).sub(&dvee_by_vector_calculus(&u)).norm() / u.norm());
    }
    Ok(worst)
}

/// Largest entry difference between the `D^∨` coefficients and the twisted
/// Dirac coefficients in the special Lagrangian frame.
pub fn dvee_vs_g2_block(n: usize) -> Result<f64> {
    let d = GridDomain::torus(n)?;
    let dv = assemble_dvee(d)?;
    let g2 = assemble_dirac(d, &G2Structure::standard(), &special_lagrangian_frame())?;
    Ok(dv.coefficients().iter().zip(g2.coefficients()).map(|(a, b)| (a - b).amax()).fold(0.0, f64::max))
}

/// Largest `τ` component over kernel sections.
pub fn tau_leak(op: &DiscreteDiracOperator, tol: f64) -> Result<f64> {
    Ok(kernel_sections(op, tol)?
        .iter()
        .flat_map(|s| s.values().iter().skip(3).step_by(4).map(|z| z.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max))
}

/// Frequencies `k ∈ [−m, m]³` at which `iσ(ξ) + aλE₄₄` is singular, with nullities.
pub fn perturbed_symbol_nullities(lambda: f64, a: f64, m: i64) -> Vec<([i64; 3], usize)> {
    let mut out = Vec::new();
    for k1 in -m..=m {
        for k2 in -m..=m {
            for k3 in -m..=m {
                let xi = [k1, k2, k3].map(|v| 2.0 * PI * v as f64);
                let mut s = dvee_symbol(xi).map(|v| Complex64::new(0.0, v));
                s[(3, 3)] += a * lambda;
                let nullity = s.singular_values().iter().filter(|v| **v < 1e-12).count();
                if nullity > 0 {
                    out.push(([k1, k2, k3], nullity));
                }
            }
        }
    }
    out
}

/// `(C_i)_{kl} = ⟨e_{k+4}, e_i × e_{l+4}⟩` straight from the cross product.
fn cross_matrices() -> Vec<DMatrix<Complex64>> {
    let st = G2Structure::standard();
    (0..3).map(|i| DMatrix::from_fn(4, 4, |k, l| c(axis(k + 3).dot(&cross(&st, &axis(i), &axis(l + 3)))))).collect()
}

/// Nullity of `s' = 2πi C₁(k₂C₂ + k₃C₃)s` on `[0, ½]` with `s` in the line
/// spanned by fibre coordinates `line` at both ends, from the exact propagator.
pub fn strip_ode_nullity(k2: i64, k3: i64, line: [usize; 2]) -> usize {
    let cm = cross_matrices();
    let k = &cm[1] * c(k2 as f64) + &cm[2] * c(k3 as f64);
    let m = &cm[0] * k * Complex64::new(0.0, 2.0 * PI);
    let prop = (m * c(0.5)).exp();
    let perp: Vec<usize> = (0..4).filter(|i| !line.contains(i)).collect();
    let mut rows = DMatrix::<Complex64>::zeros(4, 4);
    for (r, &p) in perp.iter().enumerate() {
        rows[(r, p)] = c(1.0);
        let row = prop.row(p);
        let norm = row.norm();
        rows.row_mut(2 + r).copy_from(&row.map(|z| z / norm));
    }
    rows.singular_values().iter().filter(|s| **s < 1e-9).count()
}

/// Total ODE nullities over `k₂, k₃ ∈ [−m, m]` for `ν_X` and `μ_X`, and
/// whether every nonzero frequency is regular.
pub fn strip_ode_totals(m: i64) -> (usize, usize, bool) {
    let (mut nu, mut mu, mut only_zero) = (0, 0, true);
    for k2 in -m..=m {
        for k3 in -m..=m {
            let (a, b) = (strip_ode_nullity(k2, k3, [0, 1]), strip_ode_nullity(k2, k3, [2, 3]));
            if (k2, k3) != (0, 0) && a + b > 0 {
                only_zero = false;
            }
            nu += a;
            mu += b;
        }
    }
    (nu, mu, only_zero)
}
