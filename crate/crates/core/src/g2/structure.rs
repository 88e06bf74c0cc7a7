//! G2-structures with constant coefficients: metric, orientation, ×, χ, Hodge star.

use super::form::Form;
use crate::error::{Error, Result};
use crate::exterior::{self, merge_sign};
use crate::scalar::{det, Scalar, Vec7};
use nalgebra::{SMatrix, SymmetricEigen};

pub type Mat7<S> = [[S; 7]; 7];

/// A nondegenerate 3-form together with its metric, orientation and `*φ`.
#[derive(Clone, Debug)]
pub struct G2Structure<S> {
    phi: Form<S>,
    metric: Mat7<S>,
    metric_inv: Mat7<S>,
    volume: S,
    star_phi: Form<S>,
    euclidean: bool,
}

fn identity<S: Scalar>() -> Mat7<S> {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { S::one() } else { S::zero() }))
}

/// Signed coefficients of φ₀ on 0-based index triples.
pub const PHI0_TERMS: [([usize; 3], i64); 7] = [
    ([0, 1, 2], 1),
    ([0, 3, 4], 1),
    ([0, 5, 6], 1),
    ([1, 3, 5], 1),
    ([1, 4, 6], -1),
    ([2, 3, 6], -1),
    ([2, 4, 5], -1),
];

/// φ₀ as a bare 3-form.
pub fn phi0<S: Scalar>() -> Form<S> {
    let mut f = Form::zero(3);
    for (idx, s) in PHI0_TERMS {
        f.add_term(&idx, S::from_int(s));
    }
    f
}

impl<S: Scalar> G2Structure<S> {
    /// The flat structure φ₀ with the identity metric and orientation dx₁…dx₇.
    pub fn standard() -> Self {
        Self::euclidean_with_orientation(phi0(), S::one())
    }

    /// A structure whose metric is the identity. `orientation` is ±1.
    /// The caller guarantees `phi` is a G2-form for the identity metric,
    /// e.g. the pullback of φ₀ under an orthogonal map.
    pub fn euclidean_with_orientation(phi: Form<S>, orientation: S) -> Self {
        let mut s = Self {
            phi,
            metric: identity(),
            metric_inv: identity(),
            volume: orientation,
            star_phi: Form::zero(4),
            euclidean: true,
        };
        s.star_phi = s.hodge_star(&s.phi);
        s
    }

    pub fn phi(&self) -> &Form<S> {
        &self.phi
    }

    pub fn star_phi(&self) -> &Form<S> {
        &self.star_phi
    }

    pub fn metric(&self) -> &Mat7<S> {
        &self.metric
    }

    pub fn metric_inverse(&self) -> &Mat7<S> {
        &self.metric_inv
    }

    /// Coefficient of the volume form on `dx₁∧…∧dx₇` (signed).
    pub fn volume(&self) -> &S {
        &self.volume
    }

    pub fn is_euclidean(&self) -> bool {
        self.euclidean
    }

    pub fn inner(&self, u: &Vec7<S>, v: &Vec7<S>) -> S {
        let mut s = S::zero();
        for i in 0..7 {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..7 {
                s = s + u[i].clone() * self.metric[i][j].clone() * v[j].clone();
            }
        }
        s
    }

    pub fn norm_sq(&self, u: &Vec7<S>) -> S {
        self.inner(u, u)
    }

    /// Metric dual of a 1-form given by its components.
    pub fn raise(&self, alpha: &[S]) -> Vec7<S> {
        std::array::from_fn(|i| {
            let mut s = S::zero();
            for (j, a) in alpha.iter().enumerate() {
                s = s + self.metric_inv[i][j].clone() * a.clone();
            }
            s
        })
    }

    /// Metric dual of a vector as 1-form components.
    pub fn lower(&self, v: &Vec7<S>) -> Vec7<S> {
        std::array::from_fn(|i| {
            let mut s = S::zero();
            for j in 0..7 {
                s = s + self.metric[i][j].clone() * v[j].clone();
            }
            s
        })
    }

    /// Components `α^I` of a k-form with all indices raised.
    fn raise_form(&self, form: &Form<S>) -> Vec<S> {
        if self.euclidean {
            return form.coefficients().to_vec();
        }
        let t = exterior::table(7, form.degree());
        let mut out = vec![S::zero(); t.len()];
        for (ri, o) in out.iter_mut().enumerate() {
            let i_set = t.set(ri);
            for (rj, c) in form.coefficients().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let j_set = t.set(rj);
                let minor: Vec<Vec<S>> = i_set
                    .iter()
                    .map(|&a| j_set.iter().map(|&b| self.metric_inv[a][b].clone()).collect())
                    .collect();
                *o = o.clone() + det(&minor) * c.clone();
            }
        }
        out
    }

    /// Inner product induced on k-forms.
    pub fn form_inner(&self, a: &Form<S>, b: &Form<S>) -> S {
        assert_eq!(a.degree(), b.degree(), "degree mismatch");
        let ra = self.raise_form(a);
        ra.iter().zip(b.coefficients()).fold(S::zero(), |s, (x, y)| s + x.clone() * y.clone())
    }

    /// Hodge star defined by `α ∧ *β = ⟨α,β⟩ vol`.
    pub fn hodge_star(&self, form: &Form<S>) -> Form<S> {
        let k = form.degree();
        let t = exterior::table(7, k);
        let to = exterior::table(7, 7 - k);
        let raised = self.raise_form(form);
        let full = (1u32 << 7) - 1;
        let mut coeffs = vec![S::zero(); to.len()];
        for (r, c) in raised.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = t.mask(r);
            let mc = full & !m;
            let sgn = merge_sign(m, mc);
            let v = self.volume.clone() * c.clone();
            let ro = to.rank_of(mc);
            coeffs[ro] = if sgn > 0 { coeffs[ro].clone() + v } else { coeffs[ro].clone() - v };
        }
        Form::from_coefficients(7 - k, coeffs)
    }

    /// The vector with `⟨u×v, w⟩ = φ(u,v,w)`.
    pub fn cross(&self, u: &Vec7<S>, v: &Vec7<S>) -> Vec7<S> {
        let one = self.phi.interior(u).interior(v);
        self.raise(one.coefficients())
    }

    /// The vector with `⟨χ(u,v,w), η⟩ = *φ(u,v,w,η)`.
    pub fn chi(&self, u: &Vec7<S>, v: &Vec7<S>, w: &Vec7<S>) -> Vec7<S> {
        let one = self.star_phi.interior(u).interior(v).interior(w);
        self.raise(one.coefficients())
    }
}

impl G2Structure<f64> {
    /// Recovers metric and orientation from a 3-form through
    /// `B(u,v) vol₀ = (1/6)(u⌟φ)∧(v⌟φ)∧φ`, normalised by `det(B)^{1/9}`.
    pub fn from_phi(phi: Form<f64>) -> Result<Self> {
        assert_eq!(phi.degree(), 3, "expected a 3-form");
        let units: Vec<Vec7<f64>> = (0..7).map(crate::scalar::unit_vec).collect();
        let contracted: Vec<Form<f64>> = units.iter().map(|e| phi.interior(e)).collect();
        let mut b = SMatrix::<f64, 7, 7>::zeros();
        for i in 0..7 {
            for j in i..7 {
                let top = contracted[i].wedge(&contracted[j]).wedge(&phi);
                let v = top.coefficients()[0] / 6.0;
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        let d = b.determinant();
        let scale_ref = b.abs().max().max(f64::MIN_POSITIVE);
        if d.abs() <= (1e-10 * scale_ref).powi(7) || !d.is_finite() {
            return Err(Error::DegenerateForm { min_eigenvalue: 0.0 });
        }
        let root = d.signum() * d.abs().powf(1.0 / 9.0);
        let g = b / root;
        let eig = SymmetricEigen::new(g);
        let min_eig = eig.eigenvalues.min();
        let max_eig = eig.eigenvalues.max();
        if min_eig <= 1e-10 * max_eig.max(1.0) {
            return Err(Error::DegenerateForm { min_eigenvalue: min_eig });
        }
        let ginv = g.try_inverse().ok_or(Error::DegenerateForm { min_eigenvalue: min_eig })?;
        let metric: Mat7<f64> = std::array::from_fn(|i| std::array::from_fn(|j| g[(i, j)]));
        let metric_inv: Mat7<f64> = std::array::from_fn(|i| std::array::from_fn(|j| ginv[(i, j)]));
        let euclidean = (g - SMatrix::<f64, 7, 7>::identity()).abs().max() <= 1e-14;
        let volume = d.signum() * g.determinant().sqrt();
        let mut s = Self { phi, metric, metric_inv, volume, star_phi: Form::zero(4), euclidean: false };
        if euclidean {
            s.metric = identity();
            s.metric_inv = identity();
            s.volume = d.signum();
            s.euclidean = true;
        }
        s.star_phi = s.hodge_star(&s.phi);
        Ok(s)
    }

    pub fn norm(&self, u: &Vec7<f64>) -> f64 {
        self.norm_sq(u).max(0.0).sqrt()
    }

    /// Copy in the other backend.
    pub fn to_exact_if_euclidean(&self) -> Option<G2Structure<crate::scalar::Exact>> {
        if !self.euclidean {
            return None;
        }
        let coeffs = self.phi.coefficients().iter().map(|c| crate::scalar::exact_from_f64(*c)).collect();
        Some(G2Structure::euclidean_with_orientation(
            Form::from_coefficients(3, coeffs),
            crate::scalar::exact_from_f64(self.volume),
        ))
    }
}

impl<S: Scalar> G2Structure<S> {
    /// Same structure in `f64`.
    pub fn to_f64(&self) -> G2Structure<f64> {
        let conv = |m: &Mat7<S>| -> Mat7<f64> {
            std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].to_f64_lossy()))
        };
        G2Structure {
            phi: self.phi.to_f64(),
            metric: conv(&self.metric),
            metric_inv: conv(&self.metric_inv),
            volume: self.volume.to_f64_lossy(),
            star_phi: self.star_phi.to_f64(),
            euclidean: self.euclidean,
        }
    }
}

/// The cross product table `e_i × e_j` for a structure.
pub fn cross_table<S: Scalar>(s: &G2Structure<S>) -> Vec<Vec<Vec7<S>>> {
    let e: Vec<Vec7<S>> = (0..7).map(crate::scalar::unit_vec).collect();
    (0..7).map(|i| (0..7).map(|j| s.cross(&e[i], &e[j])).collect()).collect()
}

/// Metric in nalgebra form.
pub fn metric_matrix(s: &G2Structure<f64>) -> SMatrix<f64, 7, 7> {
    SMatrix::from_fn(|i, j| s.metric()[i][j])
}
