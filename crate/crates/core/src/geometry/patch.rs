//! Charts and their first and second derivatives.

use super::V7;
use crate::error::{Error, Result};
use crate::g2::G2Structure;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A map from a parameter box in ℝᵖ into ℝ⁷.
pub trait Chart: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, p: &[f64]) -> V7;
    /// Analytic `∂_a X`, if known.
    fn first(&self, _p: &[f64]) -> Option<Vec<V7>> {
        None
    }
    /// Analytic `∂_a ∂_b X`, if known.
    fn second(&self, _p: &[f64]) -> Option<Vec<Vec<V7>>> {
        None
    }
    /// Length scale for finite-difference steps.
    fn diameter(&self) -> f64 {
        1.0
    }
}

/// Affine chart `p ↦ origin + Σ p_a d_a`; also serves flat tori in T⁷.
#[derive(Clone, Debug)]
pub struct FlatChart {
    pub origin: V7,
    pub directions: Vec<V7>,
}

impl Chart for FlatChart {
    fn dim(&self) -> usize {
        self.directions.len()
    }
    fn eval(&self, p: &[f64]) -> V7 {
        self.directions.iter().zip(p).fold(self.origin, |acc, (d, x)| acc + d * *x)
    }
    fn first(&self, _p: &[f64]) -> Option<Vec<V7>> {
        Some(self.directions.clone())
    }
    fn second(&self, _p: &[f64]) -> Option<Vec<Vec<V7>>> {
        let n = self.dim();
        Some(vec![vec![V7::zeros(); n]; n])
    }
}

/// Ellipsoid `(a sinθ cosφ, b sinθ sinφ, c cosθ)` in ℝ³×{0}, params `(θ, φ)`.
/// A sphere is the case `a = b = c`.
#[derive(Clone, Debug)]
pub struct EllipsoidChart {
    pub axes: [f64; 3],
    pub center: V7,
}

pub type SphereChart = EllipsoidChart;

impl EllipsoidChart {
    pub fn sphere(radius: f64) -> Self {
        Self { axes: [radius; 3], center: V7::zeros() }
    }

    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { axes: [a, b, c], center: V7::zeros() }
    }

    fn lift(&self, x: [f64; 3]) -> V7 {
        let mut v = V7::zeros();
        for i in 0..3 {
            v[i] = self.axes[i] * x[i];
        }
        v
    }

    /// Parameters of a point on the ellipsoid.
    pub fn params_of(&self, x: &V7) -> [f64; 2] {
        let u = [(x[0] - self.center[0]) / self.axes[0], (x[1] - self.center[1]) / self.axes[1], (x[2] - self.center[2]) / self.axes[2]];
        [u[2].clamp(-1.0, 1.0).acos(), u[1].atan2(u[0])]
    }

    /// Inward unit normal at a point of the ellipsoid.
    pub fn inward_normal(&self, x: &V7) -> V7 {
        let mut g = V7::zeros();
        for i in 0..3 {
            g[i] = -(x[i] - self.center[i]) / (self.axes[i] * self.axes[i]);
        }
        g.normalize()
    }
}

impl Chart for EllipsoidChart {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, p: &[f64]) -> V7 {
        let (t, f) = (p[0], p[1]);
        self.center + self.lift([t.sin() * f.cos(), t.sin() * f.sin(), t.cos()])
    }
    fn first(&self, p: &[f64]) -> Option<Vec<V7>> {
        let (t, f) = (p[0], p[1]);
        Some(vec![
            self.lift([t.cos() * f.cos(), t.cos() * f.sin(), -t.sin()]),
            self.lift([-t.sin() * f.sin(), t.sin() * f.cos(), 0.0]),
        ])
    }
    fn second(&self, p: &[f64]) -> Option<Vec<Vec<V7>>> {
        let (t, f) = (p[0], p[1]);
        let tt = self.lift([-t.sin() * f.cos(), -t.sin() * f.sin(), -t.cos()]);
        let tf = self.lift([-t.cos() * f.sin(), t.cos() * f.cos(), 0.0]);
        let ff = self.lift([-t.sin() * f.cos(), -t.sin() * f.sin(), 0.0]);
        Some(vec![vec![tt, tf], vec![tf, ff]])
    }
    fn diameter(&self) -> f64 {
        2.0 * self.axes.iter().cloned().fold(0.0, f64::max)
    }
}

/// Chart from a closure; derivatives by finite differences.
pub struct FnChart<F> {
    pub dim: usize,
    pub f: F,
    pub diameter: f64,
}

impl<F: Fn(&[f64]) -> V7 + Send + Sync> Chart for FnChart<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, p: &[f64]) -> V7 {
        (self.f)(p)
    }
    fn diameter(&self) -> f64 {
        self.diameter
    }
}

/// A chart together with the ambient G2-structure.
#[derive(Clone)]
pub struct ImmersedPatch {
    chart: Arc<dyn Chart>,
    structure: G2Structure<f64>,
}

impl std::fmt::Debug for ImmersedPatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImmersedPatch").field("dim", &self.chart.dim()).finish()
    }
}

impl ImmersedPatch {
    pub fn new(chart: impl Chart + 'static, structure: G2Structure<f64>) -> Self {
        Self { chart: Arc::new(chart), structure }
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn structure(&self) -> &G2Structure<f64> {
        &self.structure
    }

    pub fn position(&self, p: &[f64]) -> V7 {
        self.chart.eval(p)
    }

    /// Step `ε^{1/3}·diameter` for central first differences.
    pub fn first_step(&self) -> f64 {
        f64::EPSILON.cbrt() * self.chart.diameter()
    }

    /// Step `ε^{1/4}·diameter` for central second differences.
    pub fn second_step(&self) -> f64 {
        f64::EPSILON.powf(0.25) * self.chart.diameter()
    }

    pub fn tangent_vectors(&self, p: &[f64]) -> Vec<V7> {
        self.chart.first(p).unwrap_or_else(|| self.tangent_vectors_fd(p, self.first_step()))
    }

    pub fn tangent_vectors_fd(&self, p: &[f64], h: f64) -> Vec<V7> {
        (0..self.dim())
            .map(|a| {
                let mut pp = p.to_vec();
                let mut pm = p.to_vec();
                pp[a] += h;
                pm[a] -= h;
                (self.chart.eval(&pp) - self.chart.eval(&pm)) / (2.0 * h)
            })
            .collect()
    }

    pub fn second_derivatives(&self, p: &[f64]) -> Vec<Vec<V7>> {
        self.chart.second(p).unwrap_or_else(|| self.second_derivatives_fd(p, self.second_step()))
    }

    pub fn second_derivatives_fd(&self, p: &[f64], h: f64) -> Vec<Vec<V7>> {
        let n = self.dim();
        let at = |da: &[(usize, f64)]| {
            let mut q = p.to_vec();
            for (a, d) in da {
                q[*a] += d;
            }
            self.chart.eval(&q)
        };
        let x0 = self.chart.eval(p);
        let mut out = vec![vec![V7::zeros(); n]; n];
        for a in 0..n {
            out[a][a] = (at(&[(a, h)]) - 2.0 * x0 + at(&[(a, -h)])) / (h * h);
            for b in (a + 1)..n {
                let v = (at(&[(a, h), (b, h)]) - at(&[(a, h), (b, -h)]) - at(&[(a, -h), (b, h)])
                    + at(&[(a, -h), (b, -h)]))
                    / (4.0 * h * h);
                out[a][b] = v;
                out[b][a] = v;
            }
        }
        out
    }
}

/// JSON chart description `{type, params}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", content = "params", rename_all = "kebab-case")]
pub enum ChartSpec {
    FlatPlane { origin: Option<Vec<f64>>, directions: Vec<Vec<f64>> },
    Sphere { radius: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
    /// Flat torus through `offset` spanned by coordinate axes (1-based).
    Torus { offset: Option<Vec<f64>>, axes: Vec<usize> },
}

fn vec7(v: &[f64], what: &str) -> Result<V7> {
    if v.len() != 7 {
        return Err(Error::InvalidInput(format!("{what} must have 7 entries")));
    }
    Ok(V7::from_column_slice(v))
}

impl ChartSpec {
    pub fn build(&self, structure: G2Structure<f64>) -> Result<ImmersedPatch> {
        Ok(match self {
            ChartSpec::FlatPlane { origin, directions } => {
                let origin = origin.as_deref().map(|o| vec7(o, "origin")).transpose()?.unwrap_or_else(V7::zeros);
                let directions = directions.iter().map(|d| vec7(d, "direction")).collect::<Result<Vec<_>>>()?;
                if !(2..=3).contains(&directions.len()) {
                    return Err(Error::InvalidInput("flat-plane needs 2 or 3 directions".into()));
                }
                ImmersedPatch::new(FlatChart { origin, directions }, structure)
            }
            ChartSpec::Sphere { radius } => {
                if *radius <= 0.0 {
                    return Err(Error::InvalidInput("sphere radius must be positive".into()));
                }
                ImmersedPatch::new(EllipsoidChart::sphere(*radius), structure)
            }
            ChartSpec::Ellipsoid { a, b, c } => {
                if a.min(*b).min(*c) <= 0.0 {
                    return Err(Error::InvalidInput("ellipsoid axes must be positive".into()));
                }
                ImmersedPatch::new(EllipsoidChart::new(*a, *b, *c), structure)
            }
            ChartSpec::Torus { offset, axes } => {
                let origin = offset.as_deref().map(|o| vec7(o, "offset")).transpose()?.unwrap_or_else(V7::zeros);
                if !(2..=3).contains(&axes.len()) || axes.iter().any(|a| !(1..=7).contains(a)) {
                    return Err(Error::InvalidInput("torus needs 2 or 3 axes in 1..7".into()));
                }
                let directions = axes.iter().map(|&a| super::axis(a - 1)).collect();
                ImmersedPatch::new(FlatChart { origin, directions }, structure)
            }
        })
    }
}
