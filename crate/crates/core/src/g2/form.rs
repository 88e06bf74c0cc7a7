//! Constant-coefficient exterior forms on a 7-dimensional space.

use crate::exterior::{self, merge_sign, permutations, sort_sign};
use crate::scalar::{Scalar, Vec7};

/// A k-form stored by its coefficients on the lexicographic basis
/// `dx_I`, `I` a sorted k-subset of `0..7`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<S> {
    degree: usize,
    coeffs: Vec<S>,
}

pub type ThreeForm<S> = Form<S>;
pub type FourForm<S> = Form<S>;

impl<S: Scalar> Form<S> {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= 7, "form degree must be at most 7");
        Self { degree, coeffs: vec![S::zero(); exterior::binomial(7, degree)] }
    }

    /// Builds a form from `(indices, value)` terms; indices are 0-based and
    /// need not be sorted.
    pub fn from_terms(degree: usize, terms: &[(&[usize], S)]) -> Self {
        let mut f = Self::zero(degree);
        for (idx, v) in terms {
            f.add_term(idx, v.clone());
        }
        f
    }

    pub fn from_coefficients(degree: usize, coeffs: Vec<S>) -> Self {
        assert_eq!(coeffs.len(), exterior::binomial(7, degree), "coefficient count");
        Self { degree, coeffs }
    }

    /// `dx_{i1} ∧ ... ∧ dx_{ik}` (0-based indices).
    pub fn basis(indices: &[usize]) -> Self {
        Self::from_terms(indices.len(), &[(indices, S::one())])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[S] {
        &self.coeffs
    }

    fn table(&self) -> &'static exterior::SubsetTable {
        exterior::table(7, self.degree)
    }

    /// Coefficient on `dx_{indices}` with the sign of the sorting permutation.
    pub fn coefficient(&self, indices: &[usize]) -> S {
        assert_eq!(indices.len(), self.degree);
        match sort_sign(indices) {
            None => S::zero(),
            Some(s) => {
                let r = self.table().rank_of(exterior::mask_of(indices));
                if s > 0 {
                    self.coeffs[r].clone()
                } else {
                    -self.coeffs[r].clone()
                }
            }
        }
    }

    /// Adds `value · dx_{indices}`; repeated indices contribute nothing.
    pub fn add_term(&mut self, indices: &[usize], value: S) {
        assert_eq!(indices.len(), self.degree);
        if let Some(s) = sort_sign(indices) {
            let r = self.table().rank_of(exterior::mask_of(indices));
            let v = if s > 0 { value } else { -value };
            self.coeffs[r] = self.coeffs[r].clone() + v;
        }
    }

    /// Nonzero `(sorted indices, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&'static [usize], &S)> + '_ {
        let t = self.table();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(r, c)| (t.set(r), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|x| c.clone() * x.clone()).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { degree: self.degree, coeffs: self.coeffs.iter().map(|x| -x.clone()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let deg = self.degree + other.degree;
        assert!(deg <= 7, "wedge product exceeds top degree");
        let mut out = Self::zero(deg);
        let ta = self.table();
        let tb = other.table();
        let to = exterior::table(7, deg);
        for (ra, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ma = ta.mask(ra);
            for (rb, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let mb = tb.mask(rb);
                if ma & mb != 0 {
                    continue;
                }
                let s = merge_sign(ma, mb);
                let r = to.rank_of(ma | mb);
                let p = a.clone() * b.clone();
                out.coeffs[r] = if s > 0 { out.coeffs[r].clone() + p } else { out.coeffs[r].clone() - p };
            }
        }
        out
    }

    /// Interior product `v ⌟ α`, inserting `v` in the first slot.
    pub fn interior(&self, v: &Vec7<S>) -> Self {
        assert!(self.degree >= 1, "interior product of a 0-form");
        let mut out = Self::zero(self.degree - 1);
        let t = self.table();
        let to = exterior::table(7, self.degree - 1);
        for (r, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let set = t.set(r);
            let m = t.mask(r);
            for (pos, &i) in set.iter().enumerate() {
                if v[i].is_zero() {
                    continue;
                }
                let ro = to.rank_of(m & !(1 << i));
                let p = v[i].clone() * c.clone();
                out.coeffs[ro] = if pos % 2 == 0 { out.coeffs[ro].clone() + p } else { out.coeffs[ro].clone() - p };
            }
        }
        out
    }

    /// Evaluates the form on `degree` vectors.
    pub fn evaluate(&self, vectors: &[Vec7<S>]) -> S {
        assert_eq!(vectors.len(), self.degree, "argument count");
        let k = self.degree;
        let perms = permutations_cached(k);
        let mut total = S::zero();
        for (set, c) in self.terms() {
            let mut d = S::zero();
            for (p, s) in perms {
                let mut prod = S::one();
                for (a, &pa) in p.iter().enumerate() {
                    let x = &vectors[a][set[pa]];
                    if x.is_zero() {
                        prod = S::zero();
                        break;
                    }
                    prod = prod * x.clone();
                }
                if prod.is_zero() {
                    continue;
                }
                d = if *s > 0 { d + prod } else { d - prod };
            }
            total = total + c.clone() * d;
        }
        total
    }

    /// Euclidean coefficient norm squared (identity metric).
    pub fn coefficient_norm_sq(&self) -> S {
        self.coeffs.iter().fold(S::zero(), |a, c| a + c.clone() * c.clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64_lossy().abs()).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> Form<f64> {
        Form { degree: self.degree, coeffs: self.coeffs.iter().map(|c| c.to_f64_lossy()).collect() }
    }
}

fn permutations_cached(k: usize) -> &'static [(Vec<usize>, i32)] {
    use std::sync::OnceLock;
    static P: OnceLock<Vec<Vec<(Vec<usize>, i32)>>> = OnceLock::new();
    &P.get_or_init(|| (0..=7).map(permutations).collect())[k]
}
