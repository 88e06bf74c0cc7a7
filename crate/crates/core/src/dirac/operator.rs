//! Constant-coefficient first-order operators `Σ Cᵢ ∂ᵢ + Z` on grid sections,
//! with the twisted Dirac operator of a flat associative as the main instance.

use super::grid::{x1_derivative_matrix, DomainKind, GridDomain, GridSection};
use crate::error::{Error, Result};
use crate::g2::G2Structure;
use crate::geometry::{axis, cross, V7};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const FRAME_TOL: f64 = 1e-10;

/// Constant tangent triple and normal quadruple of a flat associative.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberFrame {
    pub tangent: [V7; 3],
    pub normal: [V7; 4],
}

impl FiberFrame {
    /// `(e₁, e₂, e₃)` and `(e₄, …, e₇)`.
    pub fn standard() -> Self {
        Self { tangent: [axis(0), axis(1), axis(2)], normal: [axis(3), axis(4), axis(5), axis(6)] }
    }

    /// Checks orthonormality and `e₃ = e₁×e₂`.
    pub fn new(tangent: [V7; 3], normal: [V7; 4], structure: &G2Structure<f64>) -> Result<Self> {
        let all: Vec<&V7> = tangent.iter().chain(normal.iter()).collect();
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                if (a.dot(b) - target).abs() > FRAME_TOL {
                    return Err(Error::InvalidFrame(format!("frame vectors {} and {} are not orthonormal", i + 1, j + 1)));
                }
            }
        }
        let defect = (cross(structure, &tangent[0], &tangent[1]) - tangent[2]).norm();
        if defect > FRAME_TOL {
            return Err(Error::InvalidFrame(format!("e3 differs from e1 x e2 by {defect:.3e}")));
        }
        Ok(Self { tangent, normal })
    }

    /// `(Cᵢ)_{kl} = ⟨η_k, eᵢ × η_l⟩`.
    pub fn cross_matrices(&self, structure: &G2Structure<f64>) -> [DMatrix<f64>; 3] {
        std::array::from_fn(|i| {
            DMatrix::from_fn(4, 4, |k, l| self.normal[k].dot(&cross(structure, &self.tangent[i], &self.normal[l])))
        })
    }

    /// Fiber coordinates to ℝ⁷.
    pub fn lift(&self, s: &[f64]) -> V7 {
        self.normal.iter().zip(s).fold(V7::zeros(), |acc, (n, c)| acc + n * *c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Spectral in every direction (closed T³).
    Fourier,
    /// Spectral in the periodic directions, central differences in `x₁`.
    CentralDifference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineTag {
    NuX,
    MuX,
    Custom,
}

/// Constant rank-2 sub-bundle of the fiber imposed at both strip ends.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCondition {
    /// Orthonormal columns spanning the line, in fiber coordinates.
    basis: DMatrix<f64>,
    tag: LineTag,
}

impl BoundaryCondition {
    /// Spanned by `vectors` (fiber coordinates), orthonormalised.
    pub fn new(vectors: &[Vec<f64>], tag: LineTag) -> Result<Self> {
        let fiber = vectors.first().map(|v| v.len()).unwrap_or(0);
        if vectors.len() != 2 || vectors.iter().any(|v| v.len() != fiber) {
            return Err(Error::InvalidInput("a boundary line needs two vectors of equal length".into()));
        }
        let m = DMatrix::from_fn(fiber, 2, |i, j| vectors[j][i]);
        let qr = m.clone().qr();
        if qr.r().diagonal().iter().any(|d| d.abs() < 1e-12) {
            return Err(Error::InvalidInput("boundary line vectors are dependent".into()));
        }
        Ok(Self { basis: qr.q().columns(0, 2).into_owned(), tag })
    }

    /// `span(η₁, η₂)`, i.e. `span(e₄, e₅)` in the standard frame.
    pub fn nu_x() -> Self {
        Self::new(&[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]], LineTag::NuX).expect("constant line")
    }

    /// `span(η₃, η₄)`, i.e. `span(e₆, e₇)` in the standard frame.
    pub fn mu_x() -> Self {
        Self::new(&[vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]], LineTag::MuX).expect("constant line")
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn tag(&self) -> LineTag {
        self.tag
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Orthogonal complement in the fiber.
    pub fn complement(&self) -> Self {
        let n = self.basis.nrows();
        let p = DMatrix::identity(n, n) - self.projector();
        let eig = p.symmetric_eigen();
        let mut cols: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
        cols.sort();
        let vectors: Vec<Vec<f64>> = cols.iter().map(|&c| eig.eigenvectors.column(c).iter().copied().collect()).collect();
        let tag = match self.tag {
            LineTag::NuX => LineTag::MuX,
            LineTag::MuX => LineTag::NuX,
            LineTag::Custom => LineTag::Custom,
        };
        Self::new(&vectors, tag).expect("complement of a line in a 4-dimensional fiber is a line")
    }

    /// Largest `|(1 − P) J b|` over the basis, for the fiber map `J`.
    pub fn invariance_defect(&self, j: &DMatrix<f64>) -> f64 {
        let n = self.basis.nrows();
        let q = DMatrix::identity(n, n) - self.projector();
        (q * j * &self.basis).amax()
    }
}

/// `Σᵢ Cᵢ ∂ᵢ + Z` on a grid domain, optionally restricted to sections whose
/// strip boundary values lie in a line.
#[derive(Clone, Debug)]
pub struct DiscreteDiracOperator {
    domain: GridDomain,
    coefficients: [DMatrix<f64>; 3],
    zero_order: Option<DMatrix<f64>>,
    boundary: Option<BoundaryCondition>,
    frame: Option<(FiberFrame, G2Structure<f64>)>,
}

/// Twisted Dirac operator `Ds = Σ eᵢ × ∂ᵢ s` of a flat associative with
/// constant frame. The torsion term vanishes for the flat structures used here.
pub fn assemble_dirac(domain: GridDomain, structure: &G2Structure<f64>, frame: &FiberFrame) -> Result<DiscreteDiracOperator> {
    let frame = FiberFrame::new(frame.tangent, frame.normal, structure)?;
    let coefficients = frame.cross_matrices(structure);
    let mut op = DiscreteDiracOperator::from_coefficients(domain, coefficients, None)?;
    op.frame = Some((frame, structure.clone()));
    Ok(op)
}

/// Restricts a strip operator to sections with boundary values in `bc`.
pub fn constrain(op: &DiscreteDiracOperator, bc: &BoundaryCondition) -> Result<DiscreteDiracOperator> {
    if op.domain.kind() != DomainKind::Strip {
        return Err(Error::InvalidInput("boundary conditions need a strip domain".into()));
    }
    if bc.basis.nrows() != op.fiber_dim() {
        return Err(Error::InvalidInput("boundary line lives in a fiber of the wrong dimension".into()));
    }
    // The inward normal at both ends is ±∂₁, so n× acts as ±C₁.
    let defect = bc.invariance_defect(&op.coefficients[0]);
    if defect > 1e-10 {
        return Err(Error::NotComplexLine { defect });
    }
    let mut out = op.clone();
    out.boundary = Some(bc.clone());
    Ok(out)
}

impl DiscreteDiracOperator {
    pub fn from_coefficients(domain: GridDomain, coefficients: [DMatrix<f64>; 3], zero_order: Option<DMatrix<f64>>) -> Result<Self> {
        let n = coefficients[0].nrows();
        if coefficients.iter().any(|c| c.nrows() != n || c.ncols() != n) || zero_order.as_ref().is_some_and(|z| z.shape() != (n, n)) {
            return Err(Error::InvalidInput("coefficient matrices must be square of equal size".into()));
        }
        Ok(Self { domain, coefficients, zero_order, boundary: None, frame: None })
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn scheme(&self) -> Scheme {
        match self.domain.kind() {
            DomainKind::Torus3 => Scheme::Fourier,
            DomainKind::Strip => Scheme::CentralDifference,
        }
    }

    pub fn fiber_dim(&self) -> usize {
        self.coefficients[0].nrows()
    }

    pub fn coefficients(&self) -> &[DMatrix<f64>; 3] {
        &self.coefficients
    }

    pub fn zero_order(&self) -> Option<&DMatrix<f64>> {
        self.zero_order.as_ref()
    }

    pub fn boundary(&self) -> Option<&BoundaryCondition> {
        self.boundary.as_ref()
    }

    pub fn frame(&self) -> Option<(&FiberFrame, &G2Structure<f64>)> {
        self.frame.as_ref().map(|(f, s)| (f, s))
    }

    /// Same operator with a constant 0-order term added.
    pub fn with_zero_order(&self, z: DMatrix<f64>) -> Result<Self> {
        if z.shape() != (self.fiber_dim(), self.fiber_dim()) {
            return Err(Error::InvalidInput("0-order term has the wrong size".into()));
        }
        let mut out = self.clone();
        out.zero_order = Some(match &self.zero_order {
            Some(old) => old + z,
            None => z,
        });
        Ok(out)
    }

    /// Same operator on another grid.
    pub fn on_domain(&self, domain: GridDomain) -> Self {
        let mut out = self.clone();
        out.domain = domain;
        out
    }

    /// Real symbol `σ(ξ) = Σ ξᵢ Cᵢ`.
    pub fn symbol(&self, xi: [f64; 3]) -> DMatrix<f64> {
        (0..3).fold(DMatrix::zeros(self.fiber_dim(), self.fiber_dim()), |acc, i| acc + &self.coefficients[i] * xi[i])
    }

    fn fiber_block(&self, k: [i64; 3], axes: std::ops::Range<usize>) -> DMatrix<Complex64> {
        let n = self.fiber_dim();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in axes {
            let f = Complex64::new(0.0, 2.0 * PI * k[i] as f64);
            m += self.coefficients[i].map(|c| f * c);
        }
        if let Some(z) = &self.zero_order {
            m += z.map(|c| Complex64::new(c, 0.0));
        }
        m
    }

    /// Matrix of the operator on one frequency block, with no boundary
    /// condition: `fiber × fiber` on T³, `fiber·(n₁+1)` square on the strip.
    pub fn block(&self, k: [i64; 3]) -> DMatrix<Complex64> {
        match self.domain.kind() {
            DomainKind::Torus3 => self.fiber_block(k, 0..3),
            DomainKind::Strip => {
                let nodes = self.domain.shape()[0];
                let f = self.fiber_dim();
                let d1 = x1_derivative_matrix(nodes, self.domain.spacing(0));
                let local = self.fiber_block(k, 1..3);
                let c1 = &self.coefficients[0];
                let mut m = DMatrix::<Complex64>::zeros(nodes * f, nodes * f);
                for j in 0..nodes {
                    for l in 0..nodes {
                        let djl = d1[(j, l)];
                        for a in 0..f {
                            for b in 0..f {
                                let mut v = Complex64::new(djl * c1[(a, b)], 0.0);
                                if j == l {
                                    v += local[(a, b)];
                                }
                                m[(j * f + a, l * f + b)] = v;
                            }
                        }
                    }
                }
                m
            }
        }
    }

    /// Columns mapping the reduced unknowns (line coordinates at boundary
    /// nodes, full fiber inside) to a full strip block vector.
    pub fn boundary_embedding(&self, bc: &BoundaryCondition) -> DMatrix<f64> {
        let nodes = self.domain.shape()[0];
        let f = self.fiber_dim();
        let r = bc.basis.ncols();
        let cols = 2 * r + (nodes - 2) * f;
        let mut e = DMatrix::zeros(nodes * f, cols);
        let mut col = 0;
        for j in 0..nodes {
            if j == 0 || j == nodes - 1 {
                for c in 0..r {
                    for a in 0..f {
                        e[(j * f + a, col)] = bc.basis[(a, c)];
                    }
                    col += 1;
                }
            } else {
                for a in 0..f {
                    e[(j * f + a, col)] = 1.0;
                    col += 1;
                }
            }
        }
        e
    }

    /// Block with the boundary condition applied (columns restricted).
    pub fn constrained_block(&self, k: [i64; 3]) -> DMatrix<Complex64> {
        let b = self.block(k);
        match &self.boundary {
            Some(bc) => b * self.boundary_embedding(bc).map(|c| Complex64::new(c, 0.0)),
            None => b,
        }
    }

    /// Applies the operator in physical space. Boundary conditions are not
    /// enforced here; the section is used as given.
    pub fn apply(&self, s: &GridSection) -> GridSection {
        assert_eq!(s.fiber(), self.fiber_dim());
        let n = self.fiber_dim();
        let mut out = match &self.zero_order {
            Some(z) => s.map_fiber(&z.map(|c| Complex64::new(c, 0.0))),
            None => GridSection::zeros(*s.domain(), n),
        };
        for i in 0..3 {
            let g = s.derivative(i).map_fiber(&self.coefficients[i].map(|c| Complex64::new(c, 0.0)));
            out = out.combine(Complex64::new(1.0, 0.0), &g, Complex64::new(1.0, 0.0));
        }
        out
    }
}
