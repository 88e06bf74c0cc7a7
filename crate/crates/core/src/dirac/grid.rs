//! Grids on T³ and on the strip `[0, ½] × T²`, complex grid sections, and
//! derivatives (spectral on periodic axes, finite differences across the strip).

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Period of every periodic axis.
pub const PERIOD: f64 = 1.0;
/// Length of the strip in `x₁`.
pub const STRIP_LENGTH: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    /// Periodic in all three axes.
    Torus3,
    /// `x₁ ∈ [0, ½]` with boundary nodes at both ends, periodic in `x₂, x₃`.
    Strip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDomain {
    kind: DomainKind,
    /// Points per periodic axis; for the strip, `resolution[0]` counts intervals in `x₁`.
    resolution: [usize; 3],
}

/// Signed frequency of FFT slot `idx` on an axis of `n` points, in
/// `{−n/2+1, …, n/2}` for even `n`. The Nyquist slot is kept as `+n/2`.
pub fn frequency(n: usize, idx: usize) -> i64 {
    if idx <= n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

impl GridDomain {
    pub fn torus(n: usize) -> Result<Self> {
        Self::new(DomainKind::Torus3, [n; 3])
    }

    pub fn strip(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        Self::new(DomainKind::Strip, [n1, n2, n3])
    }

    pub fn new(kind: DomainKind, resolution: [usize; 3]) -> Result<Self> {
        if resolution.iter().any(|&n| n < 4) {
            return Err(Error::InvalidInput(format!("resolution {resolution:?}: need at least 4 points per axis")));
        }
        Ok(Self { kind, resolution })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn resolution(&self) -> [usize; 3] {
        self.resolution
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        self.kind == DomainKind::Torus3 || axis > 0
    }

    /// Node count per axis.
    pub fn shape(&self) -> [usize; 3] {
        let mut s = self.resolution;
        if self.kind == DomainKind::Strip {
            s[0] += 1;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        if self.is_periodic(axis) {
            PERIOD / self.resolution[axis] as f64
        } else {
            STRIP_LENGTH / self.resolution[axis] as f64
        }
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        i as f64 * self.spacing(axis)
    }

    pub fn node(&self, i: [usize; 3]) -> usize {
        let s = self.shape();
        (i[0] * s[1] + i[1]) * s[2] + i[2]
    }

    pub fn unravel(&self, node: usize) -> [usize; 3] {
        let s = self.shape();
        [node / (s[1] * s[2]), (node / s[2]) % s[1], node % s[2]]
    }

    pub fn point(&self, node: usize) -> [f64; 3] {
        let i = self.unravel(node);
        [self.coordinate(0, i[0]), self.coordinate(1, i[1]), self.coordinate(2, i[2])]
    }

    /// Quadrature weight: uniform on periodic axes, composite trapezoid in `x₁`
    /// on the strip. Weights sum to the volume.
    pub fn weight(&self, node: usize) -> f64 {
        let i = self.unravel(node);
        let s = self.shape();
        let mut w = 1.0;
        for a in 0..3 {
            let mut wa = self.spacing(a);
            if !self.is_periodic(a) && (i[a] == 0 || i[a] == s[a] - 1) {
                wa *= 0.5;
            }
            w *= wa;
        }
        w
    }

    /// Area weight of a node on a boundary slice of the strip.
    pub fn boundary_weight(&self) -> f64 {
        self.spacing(1) * self.spacing(2)
    }

    /// Signed frequencies of the periodic axes (0 for the strip's `x₁`).
    pub fn block_frequencies(&self) -> Vec<[i64; 3]> {
        let [n1, n2, n3] = self.resolution;
        let mut out = Vec::new();
        match self.kind {
            DomainKind::Torus3 => {
                for a in 0..n1 {
                    for b in 0..n2 {
                        for c in 0..n3 {
                            out.push([frequency(n1, a), frequency(n2, b), frequency(n3, c)]);
                        }
                    }
                }
            }
            DomainKind::Strip => {
                for b in 0..n2 {
                    for c in 0..n3 {
                        out.push([0, frequency(n2, b), frequency(n3, c)]);
                    }
                }
            }
        }
        out
    }

    fn stride(&self, axis: usize) -> usize {
        self.shape()[axis + 1..].iter().product()
    }

    /// In-place FFT of a node-major fibered array along one periodic axis.
    /// The inverse includes the `1/n` normalisation.
    pub fn fft_axis(&self, data: &mut [Complex64], fiber: usize, axis: usize, inverse: bool) {
        assert!(self.is_periodic(axis));
        let shape = self.shape();
        let n = shape[axis];
        let stride = self.stride(axis) * fiber;
        let mut planner = FftPlanner::new();
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let scale = if inverse { 1.0 / n as f64 } else { 1.0 };
        let block = n * stride;
        for outer in 0..data.len() / block {
            for inner in 0..stride {
                let base = outer * block + inner;
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = data[base + j * stride];
                }
                fft.process(&mut buf);
                for (j, b) in buf.iter().enumerate() {
                    data[base + j * stride] = b * scale;
                }
            }
        }
    }

    /// Transforms all periodic axes.
    pub fn fft_periodic(&self, data: &mut [Complex64], fiber: usize, inverse: bool) {
        for axis in 0..3 {
            if self.is_periodic(axis) {
                self.fft_axis(data, fiber, axis, inverse);
            }
        }
    }
}

/// Central differences in the interior, second-order one-sided at both ends.
pub fn x1_derivative_matrix(nodes: usize, h: f64) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(nodes, nodes);
    let last = nodes - 1;
    d[(0, 0)] = -1.5 / h;
    d[(0, 1)] = 2.0 / h;
    d[(0, 2)] = -0.5 / h;
    for j in 1..last {
        d[(j, j - 1)] = -0.5 / h;
        d[(j, j + 1)] = 0.5 / h;
    }
    d[(last, last)] = 1.5 / h;
    d[(last, last - 1)] = -2.0 / h;
    d[(last, last - 2)] = 0.5 / h;
    d
}

/// Compact three-point second difference, second-order one-sided at the ends.
pub fn x1_second_derivative_matrix(nodes: usize, h: f64) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(nodes, nodes);
    let last = nodes - 1;
    let h2 = h * h;
    for (row, sign) in [(0usize, 1i64), (last, -1)] {
        for (k, c) in [2.0, -5.0, 4.0, -1.0].iter().enumerate() {
            let col = (row as i64 + sign * k as i64) as usize;
            d[(row, col)] = c / h2;
        }
    }
    for j in 1..last {
        d[(j, j - 1)] = 1.0 / h2;
        d[(j, j)] = -2.0 / h2;
        d[(j, j + 1)] = 1.0 / h2;
    }
    d
}

/// Fiber-valued complex function on a grid, stored node-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSection {
    domain: GridDomain,
    fiber: usize,
    values: Vec<Complex64>,
}

impl GridSection {
    pub fn zeros(domain: GridDomain, fiber: usize) -> Self {
        Self { domain, fiber, values: vec![Complex64::new(0.0, 0.0); domain.len() * fiber] }
    }

    pub fn from_values(domain: GridDomain, fiber: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != domain.len() * fiber {
            return Err(Error::InvalidInput(format!("expected {} values, got {}", domain.len() * fiber, values.len())));
        }
        Ok(Self { domain, fiber, values })
    }

    pub fn from_fn(domain: GridDomain, fiber: usize, f: impl Fn([f64; 3]) -> Vec<Complex64>) -> Self {
        let mut values = Vec::with_capacity(domain.len() * fiber);
        for node in 0..domain.len() {
            let v = f(domain.point(node));
            assert_eq!(v.len(), fiber, "fiber dimension mismatch");
            values.extend(v);
        }
        Self { domain, fiber, values }
    }

    pub fn from_real_fn(domain: GridDomain, fiber: usize, f: impl Fn([f64; 3]) -> Vec<f64>) -> Self {
        Self::from_fn(domain, fiber, |x| f(x).into_iter().map(|r| Complex64::new(r, 0.0)).collect())
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn at(&self, node: usize) -> &[Complex64] {
        &self.values[node * self.fiber..(node + 1) * self.fiber]
    }

    pub fn at_mut(&mut self, node: usize) -> &mut [Complex64] {
        &mut self.values[node * self.fiber..(node + 1) * self.fiber]
    }

    /// Weighted Hermitian inner product `Σ w · conj(a)·b`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.values.len(), other.values.len());
        let mut acc = Complex64::new(0.0, 0.0);
        for node in 0..self.domain.len() {
            let w = self.domain.weight(node);
            let s: Complex64 = self.at(node).iter().zip(other.at(node)).map(|(a, b)| a.conj() * b).sum();
            acc += s * w;
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        assert_eq!(self.values.len(), other.values.len());
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Self { domain: self.domain, fiber: self.fiber, values }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { domain: self.domain, fiber: self.fiber, values: self.values.iter().map(|z| z * c).collect() }
    }

    /// Pointwise fiber map `s ↦ M s`.
    pub fn map_fiber(&self, m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.ncols(), self.fiber);
        let mut out = Self::zeros(self.domain, m.nrows());
        for node in 0..self.domain.len() {
            let src = self.at(node);
            let dst = out.at_mut(node);
            for (r, d) in dst.iter_mut().enumerate() {
                *d = (0..self.fiber).map(|c| m[(r, c)] * src[c]).sum();
            }
        }
        out
    }

    pub fn real_part(&self) -> Self {
        Self { domain: self.domain, fiber: self.fiber, values: self.values.iter().map(|z| Complex64::new(z.re, 0.0)).collect() }
    }

    pub fn max_imaginary(&self) -> f64 {
        self.values.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// `∂_axis`: spectral on periodic axes, [`x1_derivative_matrix`] across the strip.
    pub fn derivative(&self, axis: usize) -> Self {
        self.differentiate(axis, 1)
    }

    /// `∂²_axis`: spectral on periodic axes, [`x1_second_derivative_matrix`] across the strip.
    pub fn second_derivative(&self, axis: usize) -> Self {
        self.differentiate(axis, 2)
    }

    fn differentiate(&self, axis: usize, order: i32) -> Self {
        let d = self.domain;
        let mut out = self.clone();
        if d.is_periodic(axis) {
            d.fft_axis(&mut out.values, self.fiber, axis, false);
            let n = d.shape()[axis];
            for node in 0..d.len() {
                let k = frequency(n, d.unravel(node)[axis]);
                let m = Complex64::new(0.0, 2.0 * PI * k as f64 / PERIOD).powi(order);
                for z in out.at_mut(node) {
                    *z *= m;
                }
            }
            d.fft_axis(&mut out.values, self.fiber, axis, true);
        } else {
            let nodes = d.shape()[0];
            let h = d.spacing(0);
            let m = if order == 1 { x1_derivative_matrix(nodes, h) } else { x1_second_derivative_matrix(nodes, h) };
            let per_slice = d.len() / nodes * self.fiber;
            for j in 0..nodes {
                let dst = &mut out.values[j * per_slice..(j + 1) * per_slice];
                dst.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                for (l, src) in self.values.chunks(per_slice).enumerate() {
                    let c = m[(j, l)];
                    if c != 0.0 {
                        for (z, s) in dst.iter_mut().zip(src) {
                            *z += s * c;
                        }
                    }
                }
            }
        }
        out
    }

    /// `x₁`-index of a node (strip domains).
    pub fn x1_index(&self, node: usize) -> usize {
        self.domain.unravel(node)[0]
    }
}
