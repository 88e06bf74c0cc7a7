//! The acceptance suite: one row per criterion, tolerances pinned here.

use crate::algebra::{decomposition_suite, exact_suite, reconstruction_error, CrossTable};
use crate::examples::{
    BOCHNER_TOLERANCE, BOUNDARY_TOLERANCE, FIRST_ORDER, INTERIOR_TOLERANCE, LINEARIZATION_TOLERANCE, MESH_SPECTRUM_TOLERANCE,
    ROUNDOFF, SECOND_ORDER,
};
use crate::probes::{
    bochner_summary, dvee_formula_error, dvee_vs_g2_block, linearization_error, perturbed_symbol_nullities, selfadjoint_interior,
    selfadjoint_rates, strip_dirac, strip_ode_totals, tau_leak, torus_dirac, weitzenbock_fd_rates,
};
use crate::report::{Check, Report};
use crate::surfaces::{
    ellipsoid, flat_boundary_max, index_table, mu_of, sphere, sphere_spectrum_error, tangent_chern_numbers, trace_refinement,
    trace_symmetry, E4,
};
use crate::GalleryError;
use assoc_core::boundary::NormalDerivative;
use assoc_core::dirac::{
    assemble_dvee, constrain, dvee_square_residual, kernel_dims, perturbed_dvee, weitzenbock_residual, BoundaryCondition,
    GridDomain, KERNEL_TOLERANCE, MIN_GAP,
};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Runtime budget of the exact algebra suite.
pub const ALGEBRA_BUDGET_MS: u64 = 5_000;
/// Runtime budget of the closed T³ kernel computation.
pub const TORUS_BUDGET_MS: u64 = 60_000;
/// Random rational samples in the exact suite.
pub const EXACT_SAMPLES: usize = 200;
pub const RECONSTRUCTION_PAIRS: usize = 100;
pub const TORUS_RESOLUTION: usize = 16;
pub const STRIP_PERIODIC_RESOLUTION: usize = 16;
pub const STRIP_LEVELS: [usize; 2] = [16, 32];
pub const FD_LEVELS: [usize; 3] = [8, 16, 32];
/// The symmetry residual is a signed sum of boundary and interior errors; at
/// `n₁ = 8` it is not yet in the asymptotic range.
pub const SYMMETRY_LEVELS: [usize; 3] = [16, 32, 64];
pub const SPHERE_LEVEL: usize = 3;
pub const REFINE_LEVELS: [usize; 3] = [2, 3, 4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub wall_time_ms: u64,
}

impl CriterionResult {
    /// `[PASS] 04 closed T³ Dirac kernel ...` with the failing checks listed.
    pub fn line(&self) -> String {
        let mut s = format!("[{}] {:02} {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.title);
        for c in self.checks.iter().filter(|c| !c.pass) {
            let f = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_else(|| "-".into());
            s.push_str(&format!("\n       failed {}: value {}, expected {}, tolerance {} ({})", c.name, f(c.value), f(c.expected), f(c.tolerance), c.reference));
        }
        s
    }
}

pub const TITLES: [&str; 12] = [
    "exact algebra: cross product, χ, associative identity, involutions",
    "Λ³ decomposition: projector ranks and P eigenvalues",
    "reconstruction of normal vectors on associative planes",
    "closed T³ Dirac kernel and index",
    "strip with coassociative boundary: kernel, cokernel, index",
    "linearization of the nonlinear residual",
    "Weitzenböck identity",
    "self-adjointness with boundary term",
    "boundary operator laws",
    "index formula and Chern numbers",
    "Hodge operator D^∨ and its perturbation",
    "Bochner identity",
];

fn timed(id: usize, f: impl FnOnce() -> Result<Vec<Check>, GalleryError>) -> CriterionResult {
    let start = Instant::now();
    let checks = match f() {
        Ok(c) => c,
        Err(e) => vec![Check::errored("evaluation", "criterion evaluation", &e)],
    };
    let mut r = CriterionResult {
        id,
        title: TITLES[id - 1].into(),
        pass: checks.iter().all(|c| c.pass),
        checks,
        wall_time_ms: start.elapsed().as_millis() as u64,
    };
    r.pass &= !r.checks.is_empty();
    r
}

fn with_budget(mut r: CriterionResult, budget_ms: u64) -> CriterionResult {
    let c = Check::at_most("runtime-ms", "wall time within budget", r.wall_time_ms as f64, budget_ms as f64);
    r.pass &= c.pass;
    r.checks.push(c);
    r
}

pub fn criterion(id: usize, table: &CrossTable, seed: u64) -> CriterionResult {
    match id {
        1 => with_budget(timed(1, || Ok(exact_suite(table, EXACT_SAMPLES, seed))), ALGEBRA_BUDGET_MS),
        2 => timed(2, || Ok(decomposition_suite(20, seed, ROUNDOFF))),
        3 => timed(3, || {
            Ok(vec![Check::at_most("relative-error", "identity on ν for random pairs", reconstruction_error(RECONSTRUCTION_PAIRS, seed)?, ROUNDOFF)])
        }),
        4 => with_budget(timed(4, torus_criterion), TORUS_BUDGET_MS),
        5 => timed(5, strip_criterion),
        6 => timed(6, || {
            Ok(vec![
                Check::at_most("torus", "FD of F at 0 matches D on T³", linearization_error(&torus_dirac(8)?, 50, seed)?, LINEARIZATION_TOLERANCE),
                Check::at_most("strip", "FD of F at 0 matches D on the strip", linearization_error(&strip_dirac(8, 8)?, 50, seed)?, LINEARIZATION_TOLERANCE),
            ])
        }),
        7 => timed(7, || {
            let w = weitzenbock_fd_rates(&FD_LEVELS, 8, seed)?;
            Ok(vec![
                Check::at_most("fourier", "‖D² − ∇*∇‖ on T³", weitzenbock_residual(&torus_dirac(TORUS_RESOLUTION)?, None, 5, seed), ROUNDOFF),
                Check::at_least("fd-order", "interior residual order across 8/16/32", w.min_order(), SECOND_ORDER),
            ])
        }),
        8 => timed(8, || {
            let s = selfadjoint_rates(&SYMMETRY_LEVELS, 8, seed)?;
            Ok(vec![
                Check::at_least("order", "boundary-corrected symmetry residual order across 16/32/64", s.min_order(), SECOND_ORDER),
                Check::at_most("interior", "symmetry for interior-supported sections", selfadjoint_interior(16, 8, seed)?, INTERIOR_TOLERANCE),
            ])
        }),
        9 => timed(9, boundary_criterion),
        10 => timed(10, index_criterion),
        11 => timed(11, || dvee_criterion(seed)),
        12 => timed(12, || {
            let b = bochner_summary(&FD_LEVELS, 8, KERNEL_TOLERANCE)?;
            Ok(vec![
                Check::equals("kernel-count", "dim ker (D, μ_X) on the strip", b.kernel_count as f64, 2.0),
                Check::at_most("kernel-terms", "all three terms on kernel elements", b.kernel_max_term, BOCHNER_TOLERANCE),
                Check::at_least("perturbed-order", "Bochner sum of perturbed elements is O(h)", b.perturbed.min_order(), FIRST_ORDER),
            ])
        }),
        _ => panic!("criteria are numbered 1 to 12"),
    }
}

fn torus_criterion() -> Result<Vec<Check>, GalleryError> {
    let op = torus_dirac(TORUS_RESOLUTION)?;
    let rep = kernel_dims(&op, KERNEL_TOLERANCE)?;
    Ok(vec![
        Check::equals("dim-ker", "dim ker D at 16³", rep.dim_ker as f64, 4.0),
        Check::at_least("gap", "4th/5th singular value gap", rep.gap_ratio, MIN_GAP),
        Check::equals("index", "index of D", rep.index as f64, 0.0),
    ])
}

fn strip_criterion() -> Result<Vec<Check>, GalleryError> {
    let mut checks = Vec::new();
    let (nu, mu, only_zero) = strip_ode_totals(STRIP_PERIODIC_RESOLUTION as i64 / 2);
    checks.push(Check::equals("ode-nu", "ODE oracle nullity for ν_X", nu as f64, 2.0));
    checks.push(Check::equals("ode-mu", "ODE oracle nullity for μ_X", mu as f64, 2.0));
    checks.push(Check::holds("ode-zero-mode", "only the zero frequency is singular", only_zero));
    for n1 in STRIP_LEVELS {
        let op = strip_dirac(n1, STRIP_PERIODIC_RESOLUTION)?;
        let nu = kernel_dims(&constrain(&op, &BoundaryCondition::nu_x())?, KERNEL_TOLERANCE)?;
        let mu = kernel_dims(&constrain(&op, &BoundaryCondition::mu_x())?, KERNEL_TOLERANCE)?;
        checks.push(Check::equals(&format!("ker-nu-{n1}"), "dim ker (D, ν_X)", nu.dim_ker as f64, 2.0));
        checks.push(Check::equals(&format!("coker-nu-{n1}"), "dim coker (D, ν_X)", nu.dim_coker as f64, 2.0));
        checks.push(Check::equals(&format!("duality-{n1}"), "coker (D, ν_X) = ker (D, μ_X)", nu.dim_coker as f64, mu.dim_ker as f64));
        checks.push(Check::equals(&format!("index-{n1}"), "index", nu.index as f64, 0.0));
    }
    Ok(checks)
}

fn boundary_criterion() -> Result<Vec<Check>, GalleryError> {
    let mut checks = Vec::new();
    let s = sphere(SPHERE_LEVEL, 1.0)?;
    let e = ellipsoid(SPHERE_LEVEL, [1.0, 0.8, 0.6])?;
    for (label, mesh) in [("sphere", &s), ("ellipsoid", &e)] {
        let t = trace_symmetry(mesh, &mu_of(mesh, E4)?, NormalDerivative::Ambient)?;
        checks.push(Check::at_most(&format!("{label}-symmetry"), "symmetry residual", t.asymmetry, BOUNDARY_TOLERANCE));
        checks.push(Check::at_most(&format!("{label}-trace"), "|trace − 2H| with analytic normal derivatives", t.trace_residual, BOUNDARY_TOLERANCE));
    }
    let rs = trace_refinement(&REFINE_LEVELS, |l| sphere(l, 1.0), E4)?;
    let re = trace_refinement(&REFINE_LEVELS, |l| ellipsoid(l, [1.0, 0.8, 0.6]), E4)?;
    checks.push(Check::at_least("sphere-trace-order", "mesh-fit |trace − 2H| order", rs.order(), FIRST_ORDER));
    checks.push(Check::at_least("ellipsoid-trace-order", "mesh-fit |trace − 2H| order", re.order(), FIRST_ORDER));
    for rho in [0.5, 1.0, 2.0] {
        checks.push(Check::at_most(
            &format!("sphere-spectrum-rho-{rho}"),
            "mesh-fit spectrum {1/ρ, 1/ρ} at level 3 (relative)",
            sphere_spectrum_error(SPHERE_LEVEL, rho, E4, NormalDerivative::MeshFit)?,
            MESH_SPECTRUM_TOLERANCE,
        ));
    }
    checks.push(Check::equals("flat-tori", "D_L ≡ 0 on flat boundary tori", flat_boundary_max(8)?, 0.0));
    Ok(checks)
}

fn index_criterion() -> Result<Vec<Check>, GalleryError> {
    let mut checks = Vec::new();
    let [cs, ct, cg] = tangent_chern_numbers(SPHERE_LEVEL)?;
    checks.push(Check::equals("c1-sphere", "c₁(TS²)", cs as f64, 2.0));
    checks.push(Check::equals("c1-torus", "c₁(TT²)", ct as f64, 0.0));
    checks.push(Check::equals("c1-genus-two", "c₁(TΣ₂)", cg as f64, -2.0));
    for row in index_table(SPHERE_LEVEL)? {
        checks.push(Check::equals(&format!("index-{}", row.label), "index = c₁(ν_X) + Σ(1 − gᵢ)", row.index as f64, row.expected_index as f64));
        checks.push(Check::equals(&format!("tensor-{}", row.label), "−c₁(μ_X) = c₁(ν_X) + c₁(T∂Y)", row.tensor_residual as f64, 0.0));
    }
    Ok(checks)
}

fn dvee_criterion(seed: u64) -> Result<Vec<Check>, GalleryError> {
    let op = assemble_dvee(GridDomain::torus(TORUS_RESOLUTION)?)?;
    let rep = kernel_dims(&op, KERNEL_TOLERANCE)?;
    let pert = perturbed_dvee(&op, 0.05, 1.0)?;
    let prep = kernel_dims(&pert, KERNEL_TOLERANCE)?;
    let sing = perturbed_symbol_nullities(0.05, 1.0, TORUS_RESOLUTION as i64 / 2);
    Ok(vec![
        Check::at_most("formula", "D^∨ = (−*dα − dτ, *d*α) on 100 random sections", dvee_formula_error(8, 100, seed)?, ROUNDOFF),
        Check::at_most("square", "‖(D^∨)² + Δ‖", dvee_square_residual(&op, 3, seed), ROUNDOFF),
        Check::equals("dim-ker", "dim ker D^∨ = b¹(T³) + 1", rep.dim_ker as f64, 4.0),
        Check::equals("g2-block", "D^∨ equals the twisted Dirac operator in the special Lagrangian frame", dvee_vs_g2_block(8)?, 0.0),
        Check::holds("fourier-oracle", "perturbed symbol singular only at ξ = 0 with nullity 3", sing == vec![([0, 0, 0], 3)]),
        Check::equals("perturbed-dim-ker", "perturbed kernel", prep.dim_ker as f64, 3.0),
        Check::at_most("tau-expelled", "perturbed kernel has no τ component", tau_leak(&pert, KERNEL_TOLERANCE)?, ROUNDOFF),
    ])
}

/// Runs all twelve criteria in order.
pub fn verify_all(table: &CrossTable, seed: u64) -> Vec<CriterionResult> {
    (1..=12).map(|id| criterion(id, table, seed)).collect()
}

/// The verify-all table as a report, criteria flattened into checks.
/// Timings are left out when `bit_reproducible` is set.
pub fn summary_report(results: &[CriterionResult], seed: u64, bit_reproducible: bool) -> Report {
    let mut r = Report::new("verify-all", seed);
    for c in results {
        for check in &c.checks {
            let mut k = check.clone();
            k.name = format!("c{:02}-{}", c.id, check.name);
            if bit_reproducible && check.name == "runtime-ms" {
                k.value = None;
            }
            r.check(k);
        }
        if !bit_reproducible {
            r.measure(&format!("c{:02}-wall-time-ms", c.id), c.wall_time_ms as f64);
        }
    }
    if !bit_reproducible {
        r.wall_time_ms = results.iter().map(|c| c.wall_time_ms).sum();
    }
    r
}
