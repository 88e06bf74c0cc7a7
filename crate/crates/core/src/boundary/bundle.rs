//! `n×`-complex line bundles over `∂Y`.

use super::mesh::{tangent_frame_at, SurfaceMesh};
use crate::error::{Error, Result};
use crate::g2::G2Structure;
use crate::geometry::{cross, to_v7, V7};
use serde::{Deserialize, Serialize};

/// Largest tolerated failure of `n×`-invariance.
pub const INVARIANCE_TOLERANCE: f64 = 1e-10;
/// Neighbouring fibres must overlap by at least `cos(π/4)`.
pub const MIN_OVERLAP: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// JSON description of a line bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum BundleSpec {
    /// One vector `e`: the line `span(e, n×e)`. Two vectors: that fixed plane.
    Constant { basis: Vec<[f64; 7]> },
    /// Orthogonal complement inside `ν` of the corresponding constant bundle.
    Complement { basis: Vec<[f64; 7]> },
    /// `u × T∂Y` for a fixed `u ⊥ Y`, or `T∂Y` itself when `by` is absent.
    TangentRotated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        by: Option<[f64; 7]>,
    },
    /// `span(e(x), n×e(x))` (or its complement) for `e(x) = (e + ε·A x)/|·|`,
    /// with `A` a fixed isometry from the 3-space into `ν` so `‖de‖ ≤ ε`.
    Varying { e: [f64; 7], epsilon: f64, complement: bool },
}

/// Analytic line field, evaluated at any point near `∂Y` given the normal there.
#[derive(Clone, Debug)]
pub enum LineField {
    Span { e: V7, tilt: Option<(f64, [V7; 3])> },
    Complement { e: V7, tilt: Option<(f64, [V7; 3])> },
    Plane { plane: [V7; 2], complement: bool },
    RotatedTangent { by: Option<V7> },
}

impl LineField {
    pub fn from_spec(spec: &BundleSpec, mesh: &SurfaceMesh) -> Result<Self> {
        let unit = |a: &[f64; 7]| -> Result<V7> {
            let v = mesh.project_normal(&to_v7(a));
            if v.norm() < 1e-12 || (v - to_v7(a)).norm() > 1e-10 * to_v7(a).norm().max(1.0) {
                return Err(Error::InvalidInput("bundle vectors must be nonzero and normal to Y".into()));
            }
            Ok(v.normalize())
        };
        Ok(match spec {
            BundleSpec::Constant { basis } | BundleSpec::Complement { basis } => {
                let complement = matches!(spec, BundleSpec::Complement { .. });
                match basis.as_slice() {
                    [e] => {
                        let e = unit(e)?;
                        if complement { Self::Complement { e, tilt: None } } else { Self::Span { e, tilt: None } }
                    }
                    [a, b] => {
                        let a = unit(a)?;
                        let b = to_v7(b) - a * a.dot(&to_v7(b));
                        if b.norm() < 1e-12 {
                            return Err(Error::InvalidInput("plane basis is degenerate".into()));
                        }
                        Self::Plane { plane: [a, b.normalize()], complement }
                    }
                    _ => return Err(Error::InvalidInput("constant bundles take one or two basis vectors".into())),
                }
            }
            BundleSpec::TangentRotated { by } => Self::RotatedTangent { by: by.as_ref().map(unit).transpose()? },
            BundleSpec::Varying { e, epsilon, complement } => {
                let e = unit(e)?;
                let nu = normal_basis(mesh.frame());
                // Images of the three 3-space axes: the ν-directions orthogonal to e.
                let mut images = Vec::new();
                for v in nu {
                    let r = v - e * e.dot(&v) - images.iter().fold(V7::zeros(), |acc: V7, u: &V7| acc + u * u.dot(&v));
                    if r.norm() > 1e-6 && images.len() < 3 {
                        images.push(r.normalize());
                    }
                }
                let tilt = Some((*epsilon, [images[0], images[1], images[2]]));
                if *complement { Self::Complement { e, tilt } } else { Self::Span { e, tilt } }
            }
        })
    }

    fn e_at(e: &V7, tilt: &Option<(f64, [V7; 3])>, x: &V7, frame: &[V7; 3]) -> V7 {
        match tilt {
            None => *e,
            Some((eps, a)) => (e + (a[0] * frame[0].dot(x) + a[1] * frame[1].dot(x) + a[2] * frame[2].dot(x)) * *eps).normalize(),
        }
    }

    /// Orthonormal `(b, n×b)` spanning the fibre at `x`, plus the
    /// `n×`-invariance defect of the fibre.
    pub fn fibre(&self, x: &V7, n: &V7, structure: &G2Structure<f64>, frame: &[V7; 3]) -> ([V7; 2], f64) {
        let j = |u: &V7| cross(structure, n, u);
        match self {
            Self::Span { e, tilt } => {
                let e = Self::e_at(e, tilt, x, frame);
                let je = j(&e);
                let defect = (je.norm() - 1.0).abs() + je.dot(&e).abs();
                ([e, je], defect)
            }
            Self::Complement { e, tilt } => {
                let e = Self::e_at(e, tilt, x, frame);
                let je = j(&e).normalize();
                let b = normal_basis(frame)
                    .iter()
                    .map(|v| v - e * e.dot(v) - je * je.dot(v))
                    .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
                    .unwrap()
                    .normalize();
                let jb = j(&b);
                let defect = jb.dot(&e).abs() + jb.dot(&je).abs() + (jb.norm() - 1.0).abs();
                ([b, jb], defect)
            }
            Self::Plane { plane, complement } => {
                let b = if *complement {
                    normal_basis(frame)
                        .iter()
                        .map(|v| v - plane[0] * plane[0].dot(v) - plane[1] * plane[1].dot(v))
                        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
                        .unwrap()
                        .normalize()
                } else {
                    plane[0]
                };
                let jb = j(&b);
                let inside = plane[0] * plane[0].dot(&jb) + plane[1] * plane[1].dot(&jb);
                let defect = if *complement { inside.norm() } else { (jb - inside).norm() };
                ([b, jb], defect + (jb.norm() - 1.0).abs())
            }
            Self::RotatedTangent { by } => {
                let (v, w) = tangent_frame_at(structure, frame, n);
                match by {
                    None => ([v, w], 0.0),
                    Some(u) => {
                        let (a, c) = (cross(structure, u, &v), cross(structure, u, &w));
                        let b = a.normalize();
                        let jb = j(&b);
                        let cn = c.normalize();
                        let inside = b * b.dot(&jb) + cn * cn.dot(&jb);
                        ([b, jb], (jb - inside).norm() + (jb.norm() - 1.0).abs())
                    }
                }
            }
        }
    }
}

/// Orthonormal basis of the complement of the 3-space spanned by `frame`.
pub fn normal_basis(frame: &[V7; 3]) -> Vec<V7> {
    let mut out: Vec<V7> = Vec::with_capacity(4);
    for i in 0..7 {
        let mut v = crate::geometry::axis(i);
        for u in frame.iter().chain(out.iter()) {
            v -= u * u.dot(&v);
        }
        if v.norm() > 0.5 {
            out.push(v.normalize());
        }
    }
    out
}

/// Per-vertex orthonormal bases `(b, n×b)`, optionally backed by an analytic field.
#[derive(Clone, Debug)]
pub struct ComplexLineBundle {
    bases: Vec<[V7; 2]>,
    field: Option<LineField>,
}

impl ComplexLineBundle {
    pub fn from_spec(mesh: &SurfaceMesh, spec: &BundleSpec) -> Result<Self> {
        Self::from_field(mesh, LineField::from_spec(spec, mesh)?)
    }

    pub fn from_field(mesh: &SurfaceMesh, field: LineField) -> Result<Self> {
        let mut bases = Vec::with_capacity(mesh.vertices().len());
        for (x, n) in mesh.vertices().iter().zip(mesh.normals()) {
            let (b, defect) = field.fibre(x, n, mesh.structure(), mesh.frame());
            if defect > INVARIANCE_TOLERANCE {
                return Err(Error::NotComplexLine { defect });
            }
            bases.push(b);
        }
        let bundle = Self { bases, field: Some(field) };
        bundle.check_continuity(mesh)?;
        Ok(bundle)
    }

    /// Bundle from explicit per-vertex bases; the first vector is used and
    /// the second is replaced by `n×b`.
    pub fn from_bases(mesh: &SurfaceMesh, first: &[V7]) -> Result<Self> {
        if first.len() != mesh.vertices().len() {
            return Err(Error::InvalidInput("one basis vector per vertex required".into()));
        }
        let bases = first
            .iter()
            .zip(mesh.normals())
            .map(|(b, n)| {
                let b = b.normalize();
                [b, cross(mesh.structure(), n, &b)]
            })
            .collect();
        let bundle = Self { bases, field: None };
        bundle.check_continuity(mesh)?;
        Ok(bundle)
    }

    pub fn bases(&self) -> &[[V7; 2]] {
        &self.bases
    }

    pub fn field(&self) -> Option<&LineField> {
        self.field.as_ref()
    }

    /// Rotates the basis at vertex `i` by angle `angles[i]` inside its fibre.
    pub fn rotated(&self, angles: &[f64]) -> Self {
        let bases = self
            .bases
            .iter()
            .zip(angles)
            .map(|([b, jb], t)| [b * t.cos() + jb * t.sin(), jb * t.cos() - b * t.sin()])
            .collect();
        Self { bases, field: self.field.clone() }
    }

    /// Orthogonal projection onto the fibre at vertex `i`.
    pub fn project(&self, i: usize, v: &V7) -> V7 {
        let [b, jb] = &self.bases[i];
        b * b.dot(v) + jb * jb.dot(v)
    }

    /// Complex coordinate of `P_j b_i` in the basis `(b_j, n_j×b_j)`.
    pub fn link(&self, i: usize, j: usize) -> num_complex::Complex64 {
        let b = &self.bases[i][0];
        num_complex::Complex64::new(b.dot(&self.bases[j][0]), b.dot(&self.bases[j][1]))
    }

    fn check_continuity(&self, mesh: &SurfaceMesh) -> Result<()> {
        for i in 0..self.bases.len() {
            for &j in mesh.neighbors(i) {
                let overlap = self.link(i, j).norm();
                if overlap < MIN_OVERLAP {
                    return Err(Error::Discontinuous { a: i, b: j, overlap });
                }
            }
        }
        Ok(())
    }
}
