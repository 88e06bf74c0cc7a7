//! Scalar backends for the pointwise algebra: `f64` and exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;

/// Exact rational scalar used for identity checks.
pub type Exact = BigRational;

/// Field operations shared by both backends.
pub trait Scalar:
    Clone + PartialEq + Debug + Send + Sync + 'static + Num + Signed + FromPrimitive + ToPrimitive
{
    /// `n / d` in this backend.
    fn ratio(n: i64, d: i64) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact zero test for rationals, tolerance test for floats.
    fn is_negligible(&self, tol: f64) -> bool;

    /// True for the exact backend.
    const EXACT: bool;

    fn from_int(n: i64) -> Self {
        Self::ratio(n, 1)
    }
}

impl Scalar for f64 {
    fn ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    const EXACT: bool = false;
}

impl Scalar for BigRational {
    fn ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    const EXACT: bool = true;
}

/// Seven-component vector over a scalar backend.
pub type Vec7<S> = [S; 7];

pub fn zero_vec<S: Scalar>() -> Vec7<S> {
    std::array::from_fn(|_| S::zero())
}

pub fn unit_vec<S: Scalar>(i: usize) -> Vec7<S> {
    std::array::from_fn(|j| if i == j { S::one() } else { S::zero() })
}

pub fn dot<S: Scalar>(a: &Vec7<S>, b: &Vec7<S>) -> S {
    let mut s = S::zero();
    for i in 0..7 {
        s = s + a[i].clone() * b[i].clone();
    }
    s
}

pub fn add<S: Scalar>(a: &Vec7<S>, b: &Vec7<S>) -> Vec7<S> {
    std::array::from_fn(|i| a[i].clone() + b[i].clone())
}

pub fn sub<S: Scalar>(a: &Vec7<S>, b: &Vec7<S>) -> Vec7<S> {
    std::array::from_fn(|i| a[i].clone() - b[i].clone())
}

pub fn scale<S: Scalar>(c: &S, a: &Vec7<S>) -> Vec7<S> {
    std::array::from_fn(|i| c.clone() * a[i].clone())
}

pub fn to_f64_vec<S: Scalar>(a: &Vec7<S>) -> [f64; 7] {
    std::array::from_fn(|i| a[i].to_f64_lossy())
}

/// Converts an `f64` with a short exact binary expansion to a rational.
pub fn exact_from_f64(x: f64) -> Exact {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

pub fn exact_is_one(x: &Exact) -> bool {
    x.is_one()
}

/// Determinant by fraction-tolerant Gaussian elimination (square input).
pub fn det<S: Scalar>(m: &[Vec<S>]) -> S {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut d = S::one();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| {
            a[i][c]
                .abs()
                .to_f64_lossy()
                .partial_cmp(&a[j][c].abs().to_f64_lossy())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let piv = match piv {
            Some(p) if !a[p][c].is_zero() => p,
            _ => return S::zero(),
        };
        if piv != c {
            a.swap(piv, c);
            d = -d;
        }
        d = d * a[c][c].clone();
        for r in (c + 1)..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone() / a[c][c].clone();
            for k in c..n {
                let t = f.clone() * a[c][k].clone();
                a[r][k] = a[r][k].clone() - t;
            }
        }
    }
    d
}

/// Solves `m x = b` for square nonsingular `m`; `None` if singular.
pub fn solve<S: Scalar>(m: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| {
            a[i][c]
                .abs()
                .to_f64_lossy()
                .partial_cmp(&a[j][c].abs().to_f64_lossy())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv][c].is_zero() {
            return None;
        }
        a.swap(piv, c);
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone() / a[c][c].clone();
            for k in c..=n {
                let t = f.clone() * a[c][k].clone();
                a[r][k] = a[r][k].clone() - t;
            }
        }
    }
    Some((0..n).map(|i| a[i][n].clone() / a[i][i].clone()).collect())
}

/// Rank by exact elimination; entries with `is_negligible(tol)` count as zero.
pub fn rank<S: Scalar>(m: &[Vec<S>], tol: f64) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let piv = (r..rows).max_by(|&i, &j| {
            a[i][c]
                .abs()
                .to_f64_lossy()
                .partial_cmp(&a[j][c].abs().to_f64_lossy())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let Some(piv) = piv else { break };
        if a[piv][c].is_negligible(tol) {
            continue;
        }
        a.swap(piv, r);
        for i in (r + 1)..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone() / a[r][c].clone();
            for k in c..cols {
                let t = f.clone() * a[r][k].clone();
                a[i][k] = a[i][k].clone() - t;
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_det_and_solve() {
        let m: Vec<Vec<Exact>> = vec![
            vec![Exact::from_int(2), Exact::from_int(1)],
            vec![Exact::from_int(1), Exact::from_int(3)],
        ];
        assert_eq!(det(&m), Exact::from_int(5));
        let x = solve(&m, &[Exact::from_int(3), Exact::from_int(4)]).unwrap();
        assert_eq!(x[0], Exact::ratio(1, 1));
        assert_eq!(x[1], Exact::ratio(1, 1));
    }

    #[test]
    fn rank_of_singular_matrix() {
        let m: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(rank(&m, 1e-12), 1);
    }
}
