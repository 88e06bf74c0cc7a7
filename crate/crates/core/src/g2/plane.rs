//! Oriented 3- and 4-planes and the associativity diagnostics on them.

use super::decompose::p_operator;
use super::structure::G2Structure;
use crate::error::{Error, Result};
use crate::scalar::{scale, sub, Scalar, Vec7};

/// An oriented k-plane (k = 3 or 4) given by an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane<S> {
    basis: Vec<Vec7<S>>,
    orientation: i8,
}

impl<S: Scalar> Plane<S> {
    /// Validates orthonormality w.r.t. the structure's metric
    /// (exactly for rationals, to `1e-12` for floats).
    pub fn new(basis: Vec<Vec7<S>>, structure: &G2Structure<S>) -> Result<Self> {
        if basis.len() != 3 && basis.len() != 4 {
            return Err(Error::InvalidInput(format!("plane dimension {} not in {{3,4}}", basis.len())));
        }
        let mut defect: f64 = 0.0;
        for (a, u) in basis.iter().enumerate() {
            for (b, v) in basis.iter().enumerate() {
                let target = if a == b { S::one() } else { S::zero() };
                let d = structure.inner(u, v) - target;
                if !d.is_negligible(1e-12) {
                    defect = defect.max(d.abs().to_f64_lossy());
                    if S::EXACT {
                        defect = defect.max(f64::MIN_POSITIVE);
                    }
                }
            }
        }
        if defect > 0.0 {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self { basis, orientation: 1 })
    }

    /// Span of coordinate axes (0-based), orthonormal for Euclidean structures.
    pub fn coordinate(axes: &[usize], structure: &G2Structure<S>) -> Result<Self> {
        Self::new(axes.iter().map(|&i| crate::scalar::unit_vec(i)).collect(), structure)
    }

    pub fn basis(&self) -> &[Vec7<S>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    /// Same plane with the opposite orientation (first two vectors swapped).
    pub fn reversed(&self) -> Self {
        let mut basis = self.basis.clone();
        basis.swap(0, 1);
        Self { basis, orientation: -self.orientation }
    }

    /// Orthogonal projection onto the plane's complement.
    pub fn project_normal(&self, v: &Vec7<S>, structure: &G2Structure<S>) -> Vec7<S> {
        let mut out = v.clone();
        for e in &self.basis {
            let c = structure.inner(e, v);
            out = sub(&out, &scale(&c, e));
        }
        out
    }
}

impl Plane<f64> {
    /// Gram–Schmidt orthonormalisation of spanning vectors.
    pub fn orthonormalize(vectors: &[Vec7<f64>], structure: &G2Structure<f64>) -> Result<Self> {
        let mut basis: Vec<Vec7<f64>> = Vec::new();
        for v in vectors {
            let mut w = *v;
            for _ in 0..2 {
                for e in &basis {
                    let c = structure.inner(e, &w);
                    w = sub(&w, &scale(&c, e));
                }
            }
            let n = structure.norm(&w);
            if n < 1e-12 {
                return Err(Error::InvalidInput("spanning vectors are dependent".into()));
            }
            basis.push(scale(&(1.0 / n), &w));
        }
        Self::new(basis, structure)
    }
}

/// `|χ(e₁,e₂,e₃)|`, zero exactly on associative planes.
pub fn assoc_residual<S: Scalar>(p: &Plane<S>, structure: &G2Structure<S>) -> f64 {
    assert_eq!(p.dim(), 3, "assoc_residual needs a 3-plane");
    let b = p.basis();
    let c = structure.chi(&b[0], &b[1], &b[2]);
    structure.norm_sq(&c).to_f64_lossy().max(0.0).sqrt()
}

/// Norm of `φ` restricted to a 4-plane, zero exactly on coassociative planes.
pub fn coassoc_residual<S: Scalar>(p: &Plane<S>, structure: &G2Structure<S>) -> f64 {
    assert_eq!(p.dim(), 4, "coassoc_residual needs a 4-plane");
    let b = p.basis();
    let mut total = 0.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            for k in (j + 1)..4 {
                let v = structure.phi().evaluate(&[b[i].clone(), b[j].clone(), b[k].clone()]).to_f64_lossy();
                total += v * v;
            }
        }
    }
    total.sqrt()
}

/// Quasi-random unit vectors in ℝ⁴ (Halton points pushed to S³ by the
/// volume-preserving Hopf parametrisation).
fn sphere_points(count: usize) -> Vec<[f64; 4]> {
    fn halton(mut i: usize, base: usize) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }
    let tau = std::f64::consts::TAU;
    (1..=count)
        .map(|i| {
            let (u1, u2, u3) = (halton(i, 2), halton(i, 3), halton(i, 5));
            let a = (1.0 - u1).sqrt();
            let b = u1.sqrt();
            [a * (tau * u2).sin(), a * (tau * u2).cos(), b * (tau * u3).sin(), b * (tau * u3).cos()]
        })
        .collect()
}

/// Associativity residual of the 3-plane orthogonal to `line` inside `p`.
fn complement_residual(p: &Plane<f64>, line: &[f64; 4], structure: &G2Structure<f64>) -> f64 {
    let b = p.basis();
    let n = line.iter().map(|x| x * x).sum::<f64>().sqrt();
    let l: Vec<f64> = line.iter().map(|x| x / n).collect();
    // Orthonormal basis of l⊥ in ℝ⁴ by Gram–Schmidt against the axes.
    let mut comp: Vec<[f64; 4]> = Vec::new();
    for axis in 0..4 {
        let mut w = [0.0; 4];
        w[axis] = 1.0;
        let c: f64 = (0..4).map(|i| w[i] * l[i]).sum();
        for i in 0..4 {
            w[i] -= c * l[i];
        }
        for e in &comp {
            let c: f64 = (0..4).map(|i| w[i] * e[i]).sum();
            for i in 0..4 {
                w[i] -= c * e[i];
            }
        }
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nw > 0.3 {
            comp.push(w.map(|x| x / nw));
        }
        if comp.len() == 3 {
            break;
        }
    }
    let lift = |c: &[f64; 4]| -> Vec7<f64> { std::array::from_fn(|k| (0..4).map(|a| c[a] * b[a][k]).sum()) };
    let u = lift(&comp[0]);
    let v = lift(&comp[1]);
    let w = lift(&comp[2]);
    structure.norm(&structure.chi(&u, &v, &w))
}

/// Approximate minimum of `assoc_residual` over the 3-planes inside `p`.
///
/// Each 3-plane in a 4-plane is the complement of a line; lines are sampled
/// quasi-randomly and the best few are refined by projected gradient descent
/// on the sphere.
pub fn free_margin(p: &Plane<f64>, structure: &G2Structure<f64>, samples: usize, refine_steps: usize) -> f64 {
    assert_eq!(p.dim(), 4, "free_margin needs a 4-plane");
    assert!(samples >= 1, "free_margin needs at least one sample");
    let pts = sphere_points(samples);
    let mut scored: Vec<(f64, [f64; 4])> =
        pts.iter().map(|l| (complement_residual(p, l, structure), *l)).collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = scored[0].0;
    for (r0, l0) in scored.iter().take(8) {
        let mut l = *l0;
        let mut r = *r0;
        let mut step = 0.1;
        for _ in 0..refine_steps {
            let h = 1e-6;
            let mut grad = [0.0; 4];
            for i in 0..4 {
                let mut lp = l;
                let mut lm = l;
                lp[i] += h;
                lm[i] -= h;
                let fp = complement_residual(p, &lp, structure).powi(2);
                let fm = complement_residual(p, &lm, structure).powi(2);
                grad[i] = (fp - fm) / (2.0 * h);
            }
            let radial: f64 = (0..4).map(|i| grad[i] * l[i]).sum();
            for i in 0..4 {
                grad[i] -= radial * l[i];
            }
            let gn = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
            if gn < 1e-14 {
                break;
            }
            loop {
                let mut cand = [0.0; 4];
                for i in 0..4 {
                    cand[i] = l[i] - step * grad[i] / gn;
                }
                let cn = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
                let cand = cand.map(|x| x / cn);
                let rc = complement_residual(p, &cand, structure);
                if rc < r {
                    l = cand;
                    r = rc;
                    step *= 1.5;
                    break;
                }
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
            }
            if step < 1e-12 {
                break;
            }
        }
        best = best.min(r);
    }
    best
}

/// Evaluates `Σ_l (η_l∧ω) ⌟ *P(*(φ∧α)) ⊗ η_l` for a normal vector `s` of an
/// associative plane, with `φ(ω) = 1` and `α` the metric dual of `s`.
///
/// The contraction places `ω` in the first three slots and `η_l` last,
/// matching `⟨χ(ω), η⟩ = *φ(ω, η)`. The sum over an orthonormal normal
/// frame equals the normal projection of the metric dual of `β(ω, ·)`.
pub fn reconstruct_section<S: Scalar>(
    s: &Vec7<S>,
    p: &Plane<S>,
    structure: &G2Structure<S>,
    tolerance: f64,
) -> Result<Vec7<S>> {
    let residual = assoc_residual(p, structure);
    if residual > tolerance {
        return Err(Error::NotAssociative { residual });
    }
    let mut b = p.basis().to_vec();
    let phi_omega = structure.phi().evaluate(&b);
    if phi_omega.to_f64_lossy() < 0.0 {
        b.swap(0, 1);
    }
    let alpha = crate::g2::form::Form::from_coefficients(1, structure.lower(s).to_vec());
    let inner = structure.hodge_star(&structure.phi().wedge(&alpha));
    let beta = structure.hodge_star(&p_operator(&inner, structure));
    let one = beta.interior(&b[0]).interior(&b[1]).interior(&b[2]);
    let v = structure.raise(one.coefficients());
    Ok(p.project_normal(&v, structure))
}
