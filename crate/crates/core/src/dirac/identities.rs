//! Discrete residuals of the Weitzenböck, self-adjointness and Bochner identities.

use super::grid::{DomainKind, GridSection};
use super::operator::DiscreteDiracOperator;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|c| Complex64::new(c, 0.0))
}

/// `∇*∇s = −Σ ∂ᵢ² s` for a constant normal frame in flat space.
pub fn rough_laplacian(s: &GridSection) -> GridSection {
    let mut out = GridSection::zeros(*s.domain(), s.fiber());
    for i in 0..3 {
        out = out.combine(Complex64::new(1.0, 0.0), &s.second_derivative(i), Complex64::new(-1.0, 0.0));
    }
    out
}

/// Random smooth section: Fourier modes with `|kᵢ| ≤ 2` on T³; on the strip,
/// a few such modes in `x₂, x₃` times slowly varying cosines in `x₁`.
pub fn random_section(op: &DiscreteDiracOperator, rng: &mut ChaCha8Rng) -> GridSection {
    let domain = *op.domain();
    let fiber = op.fiber_dim();
    match domain.kind() {
        DomainKind::Torus3 => {
            let mut values = vec![Complex64::new(0.0, 0.0); domain.len() * fiber];
            for node in 0..domain.len() {
                let k = domain.unravel(node);
                let low = (0..3).all(|a| super::grid::frequency(domain.shape()[a], k[a]).abs() <= 2);
                if low {
                    for z in &mut values[node * fiber..(node + 1) * fiber] {
                        *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    }
                }
            }
            domain.fft_periodic(&mut values, fiber, true);
            GridSection::from_values(domain, fiber, values).expect("sized to the domain")
        }
        DomainKind::Strip => {
            let terms: Vec<(Vec<Complex64>, [i64; 2], f64, f64)> = (0..4)
                .map(|_| {
                    let amp = (0..fiber).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                    (amp, [rng.gen_range(-2..=2), rng.gen_range(-2..=2)], rng.gen_range(0.0..1.5), rng.gen_range(0.0..2.0 * PI))
                })
                .collect();
            GridSection::from_fn(domain, fiber, |x| {
                let mut v = vec![Complex64::new(0.0, 0.0); fiber];
                for (amp, k, m, ph) in &terms {
                    let wave = Complex64::from_polar(1.0, 2.0 * PI * (k[0] as f64 * x[1] + k[1] as f64 * x[2]));
                    let prof = (2.0 * PI * m * x[0] + ph).cos();
                    for (z, a) in v.iter_mut().zip(amp) {
                        *z += a * wave * prof;
                    }
                }
                v
            })
        }
    }
}

/// Strip nodes where `D∘D` uses central differences only (all of T³).
fn interior(s: &GridSection, node: usize) -> bool {
    let d = s.domain();
    match d.kind() {
        DomainKind::Torus3 => true,
        DomainKind::Strip => {
            let j = d.unravel(node)[0];
            j >= 2 && j + 2 <= d.resolution()[0]
        }
    }
}

fn masked_norm(s: &GridSection, mask: impl Fn(usize) -> bool) -> f64 {
    let d = s.domain();
    let mut acc = 0.0;
    for node in 0..d.len() {
        if mask(node) {
            acc += d.weight(node) * s.at(node).iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
    }
    acc.sqrt()
}

/// `‖(B(k)² − T(k)) ŝ(k)‖ / ‖ŝ‖` summed over Fourier blocks of a T³ section.
pub(crate) fn spectral_square_defect(
    op: &DiscreteDiracOperator,
    s: &GridSection,
    target: impl Fn([i64; 3]) -> DMatrix<Complex64>,
) -> f64 {
    let d = *op.domain();
    let f = s.fiber();
    let mut hat = s.values().to_vec();
    d.fft_periodic(&mut hat, f, false);
    let shape = d.shape();
    let (mut num, mut den) = (0.0, 0.0);
    for node in 0..d.len() {
        let i = d.unravel(node);
        let k = [0, 1, 2].map(|a| super::grid::frequency(shape[a], i[a]));
        let v = nalgebra::DVector::from_column_slice(&hat[node * f..(node + 1) * f]);
        let b = op.block(k);
        let r = &b * (&b * &v) - target(k) * &v;
        num += r.norm_squared();
        den += v.norm_squared();
    }
    (num / den).sqrt()
}

/// `|ξ|²` for the frequency `k` on the unit torus.
pub(crate) fn laplacian_symbol(k: [i64; 3]) -> f64 {
    k.iter().map(|v| (2.0 * PI * *v as f64).powi(2)).sum()
}

/// `max ‖D²s − ∇*∇s − ℛ_ν s‖ / ‖s‖` over random sections.
///
/// On T³ the comparison is made per Fourier block, where the identity is
/// algebraic. On the strip both norms are taken over nodes at least two
/// steps from the boundary, where `D∘D` uses central differences only.
pub fn weitzenbock_residual(op: &DiscreteDiracOperator, curvature: Option<&DMatrix<f64>>, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = op.fiber_dim();
    let curv = curvature.map(complex).unwrap_or_else(|| DMatrix::zeros(n, n));
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let s = random_section(op, &mut rng);
        let r = match op.domain().kind() {
            DomainKind::Torus3 => spectral_square_defect(op, &s, |k| {
                DMatrix::<Complex64>::identity(n, n) * Complex64::new(laplacian_symbol(k), 0.0) + &curv
            }),
            DomainKind::Strip => {
                let r = op.apply(&op.apply(&s)).sub(&rough_laplacian(&s)).sub(&s.map_fiber(&curv));
                masked_norm(&r, |node| interior(&s, node)) / masked_norm(&s, |node| interior(&s, node))
            }
        };
        worst = worst.max(r);
    }
    worst
}

/// Boundary integral `∮⟨n×s, t⟩` over both strip ends, with the inward
/// normal `n = ±∂₁` acting as `±C₁`. Zero on T³.
pub fn boundary_pairing(op: &DiscreteDiracOperator, s: &GridSection, t: &GridSection) -> Complex64 {
    let d = op.domain();
    if d.kind() != DomainKind::Strip {
        return Complex64::new(0.0, 0.0);
    }
    let c1 = complex(&op.coefficients()[0]);
    let last = d.resolution()[0];
    let w = d.boundary_weight();
    let mut acc = Complex64::new(0.0, 0.0);
    for node in 0..d.len() {
        let j = d.unravel(node)[0];
        let sign = if j == 0 {
            1.0
        } else if j == last {
            -1.0
        } else {
            continue;
        };
        let sv = nalgebra::DVector::from_column_slice(s.at(node));
        let ns = (&c1 * sv).map(|z| z * sign);
        acc += ns.iter().zip(t.at(node)).map(|(a, b)| a.conj() * b).sum::<Complex64>() * w;
    }
    acc
}

/// `|⟨Ds, t⟩ − ⟨s, Dt⟩ + ∮⟨n×s, t⟩|`.
pub fn selfadjoint_residual(op: &DiscreteDiracOperator, s: &GridSection, t: &GridSection) -> f64 {
    let lhs = op.apply(s).inner(t) - s.inner(&op.apply(t)) + boundary_pairing(op, s, t);
    lhs.norm()
}

/// The three terms of the integrated Weitzenböck identity for a section whose
/// boundary values lie in the operator's line `L`, and their comparison with
/// `∫|Ds|²`. For kernel elements `total` vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BochnerTerms {
    /// `∫|∇s|²`.
    pub gradient: f64,
    /// `∫⟨ℛ_ν s, s⟩`.
    pub curvature: f64,
    /// `∮⟨D_L s, s⟩`.
    pub boundary: f64,
    pub total: f64,
    /// `∫|Ds|²`.
    pub dirac_norm_sq: f64,
    /// `total − ∫|Ds|²`.
    pub defect: f64,
}

/// Evaluates [`BochnerTerms`] on the strip. `D_L s = π_L(v×∇_w s − w×∇_v s)`
/// with `v = ∂₂` and `w = n×v = ±∂₃`.
pub fn bochner_terms(op: &DiscreteDiracOperator, s: &GridSection, curvature: Option<&DMatrix<f64>>) -> Result<BochnerTerms> {
    let d = *op.domain();
    let bc = match (d.kind(), op.boundary()) {
        (DomainKind::Strip, Some(bc)) => bc.clone(),
        _ => return Err(Error::InvalidInput("Bochner terms need a strip operator with a boundary line".into())),
    };
    let pl = complex(&bc.projector());
    let last = d.resolution()[0];
    let mut leak: f64 = 0.0;
    for node in 0..d.len() {
        let j = d.unravel(node)[0];
        if j == 0 || j == last {
            let v = nalgebra::DVector::from_column_slice(s.at(node));
            leak = leak.max((&v - &pl * &v).camax());
        }
    }
    let scale = s.max_abs().max(f64::MIN_POSITIVE);
    if leak > 1e-8 * scale {
        return Err(Error::InvalidInput(format!("boundary values leave the line by {leak:.3e}")));
    }
    let grads: Vec<GridSection> = (0..3).map(|i| s.derivative(i)).collect();
    let gradient: f64 = grads.iter().map(|g| g.inner(g).re).sum();
    let curv = match curvature {
        Some(c) => s.map_fiber(&complex(c)).inner(s).re,
        None => 0.0,
    };
    let [_, c2, c3] = op.coefficients().clone().map(|m| complex(&m));
    let w = d.boundary_weight();
    let mut boundary = 0.0;
    for node in 0..d.len() {
        let j = d.unravel(node)[0];
        let sign = if j == 0 {
            1.0
        } else if j == last {
            -1.0
        } else {
            continue;
        };
        let d2 = nalgebra::DVector::from_column_slice(grads[1].at(node));
        let d3 = nalgebra::DVector::from_column_slice(grads[2].at(node));
        let dl = (&pl * (&c2 * d3 - &c3 * d2)).map(|z| z * sign);
        boundary += dl.iter().zip(s.at(node)).map(|(a, b)| (a.conj() * b).re).sum::<f64>() * w;
    }
    let ds = op.apply(s);
    let dirac_norm_sq = ds.inner(&ds).re;
    let total = gradient + curv + boundary;
    Ok(BochnerTerms { gradient, curvature: curv, boundary, total, dirac_norm_sq, defect: total - dirac_norm_sq })
}
