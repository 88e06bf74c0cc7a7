//! Closed triangulated surfaces `∂Y` inside a flat associative 3-space
//! `Y ⊂ ℝ⁷`, with inward unit normals at the vertices.

use super::marching::marching_tetrahedra;
use crate::error::{Error, Result};
use crate::g2::G2Structure;
use crate::geometry::{axis, cross, second_fundamental, adapted_frame, EllipsoidChart, ImmersedPatch, V7};
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

/// Analytic description of a surface, defined on a neighbourhood of it.
pub trait SurfaceGeometry: Send + Sync {
    /// Inward unit normal, smoothly extended off the surface.
    fn inward_normal(&self, x: &V7) -> V7;
    /// Principal curvatures with respect to the inward normal (positive on
    /// convex surfaces), ascending.
    fn principal_curvatures(&self, x: &V7) -> [f64; 2];
    fn mean_curvature(&self, x: &V7) -> f64 {
        let k = self.principal_curvatures(x);
        0.5 * (k[0] + k[1])
    }
    /// First-order estimate of the distance from `x` to the surface.
    fn distance(&self, x: &V7) -> f64;
}

/// Ellipsoid in `ℝ³ × {0}`; curvatures from the submanifold geometry module.
pub struct EllipsoidSurface {
    chart: EllipsoidChart,
    patch: ImmersedPatch,
}

impl EllipsoidSurface {
    pub fn new(a: f64, b: f64, c: f64, structure: &G2Structure<f64>) -> Self {
        let chart = EllipsoidChart::new(a, b, c);
        Self { patch: ImmersedPatch::new(chart.clone(), structure.clone()), chart }
    }
}

impl SurfaceGeometry for EllipsoidSurface {
    fn inward_normal(&self, x: &V7) -> V7 {
        self.chart.inward_normal(x)
    }

    fn distance(&self, x: &V7) -> f64 {
        let a = self.chart.axes;
        let d = x - self.chart.center;
        let q: f64 = (0..3).map(|i| (d[i] / a[i]).powi(2)).sum();
        let g = (0..3).map(|i| (2.0 * d[i] / (a[i] * a[i])).powi(2)).sum::<f64>().sqrt();
        (q - 1.0).abs() / g
    }

    fn principal_curvatures(&self, x: &V7) -> [f64; 2] {
        let p = self.chart.params_of(x);
        // The chart degenerates at its poles (0, 0, ±c).
        if p[0].sin().abs() < 1e-6 {
            return self.pole_curvatures();
        }
        let frame = adapted_frame(&self.patch, &p).expect("ellipsoid chart is immersed off the poles");
        let sff = second_fundamental(&self.patch, &p, &frame);
        let k = sff.principal_curvatures(&self.chart.inward_normal(x));
        [k[0], k[1]]
    }
}

impl EllipsoidSurface {
    fn pole_curvatures(&self) -> [f64; 2] {
        let [a, b, c] = self.chart.axes;
        let mut k = [c / (a * a), c / (b * b)];
        k.sort_by(|x, y| x.partial_cmp(y).unwrap());
        k
    }
}

/// Level set `{f = 0}` in the 3-space spanned by `frame`, with `f < 0` inside.
pub struct ImplicitSurface {
    f: Arc<dyn Fn([f64; 3]) -> f64 + Send + Sync>,
    frame: [V7; 3],
}

impl ImplicitSurface {
    pub fn new(f: impl Fn([f64; 3]) -> f64 + Send + Sync + 'static, frame: [V7; 3]) -> Self {
        Self { f: Arc::new(f), frame }
    }

    fn coords(&self, x: &V7) -> [f64; 3] {
        [self.frame[0].dot(x), self.frame[1].dot(x), self.frame[2].dot(x)]
    }

    fn gradient(&self, y: [f64; 3]) -> [f64; 3] {
        let h = 1e-6;
        std::array::from_fn(|i| {
            let (mut p, mut m) = (y, y);
            p[i] += h;
            m[i] -= h;
            ((self.f)(p) - (self.f)(m)) / (2.0 * h)
        })
    }

    /// Outward unit normal in 3-space coordinates.
    fn unit_normal(&self, y: [f64; 3]) -> [f64; 3] {
        let g = self.gradient(y);
        let n = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
        g.map(|v| v / n)
    }

    /// Newton projection onto the level set.
    pub fn project(&self, y: [f64; 3]) -> [f64; 3] {
        let mut y = y;
        for _ in 0..20 {
            let g = self.gradient(y);
            let g2 = g.iter().map(|v| v * v).sum::<f64>();
            let step = (self.f)(y) / g2;
            for i in 0..3 {
                y[i] -= step * g[i];
            }
            if step.abs() * g2.sqrt() < 1e-14 {
                break;
            }
        }
        y
    }

    fn lift(&self, y: [f64; 3]) -> V7 {
        self.frame[0] * y[0] + self.frame[1] * y[1] + self.frame[2] * y[2]
    }
}

impl SurfaceGeometry for ImplicitSurface {
    fn inward_normal(&self, x: &V7) -> V7 {
        -self.lift(self.unit_normal(self.coords(x)))
    }

    fn distance(&self, x: &V7) -> f64 {
        let y = self.coords(x);
        let g = self.gradient(y);
        (self.f)(y).abs() / (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt()
    }

    /// Eigenvalues of the Hessian of `f` restricted to the tangent plane,
    /// divided by `|∇f|`.
    fn principal_curvatures(&self, x: &V7) -> [f64; 2] {
        let y = self.coords(x);
        let h = 1e-4;
        let jac: Vec<[f64; 3]> = (0..3)
            .map(|j| {
                let (mut p, mut m) = (y, y);
                p[j] += h;
                m[j] -= h;
                let (gp, gm) = (self.unit_normal(p), self.unit_normal(m));
                std::array::from_fn(|i| (gp[i] - gm[i]) / (2.0 * h))
            })
            .collect();
        let n = self.unit_normal(y);
        let mut t1 = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let d = t1[0] * n[0] + t1[1] * n[1] + t1[2] * n[2];
        t1 = std::array::from_fn(|i| t1[i] - d * n[i]);
        let l = (t1[0] * t1[0] + t1[1] * t1[1] + t1[2] * t1[2]).sqrt();
        t1 = t1.map(|v| v / l);
        let t2 = [n[1] * t1[2] - n[2] * t1[1], n[2] * t1[0] - n[0] * t1[2], n[0] * t1[1] - n[1] * t1[0]];
        // Shape operator of the outward normal: dN(t) = Σ_j t_j ∂_j N.
        let dn = |t: &[f64; 3]| -> [f64; 3] { std::array::from_fn(|i| (0..3).map(|j| t[j] * jac[j][i]).sum()) };
        let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let (a, b, c) = (dot(&dn(&t1), &t1), 0.5 * (dot(&dn(&t1), &t2) + dot(&dn(&t2), &t1)), dot(&dn(&t2), &t2));
        let m = nalgebra::Matrix2::new(a, b, b, c);
        let mut ev = [m.symmetric_eigenvalues()[0], m.symmetric_eigenvalues()[1]];
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ev
    }
}

/// Plane through `origin` with constant inward normal (boundary tori of the strip).
pub struct FlatSurface {
    pub origin: V7,
    pub normal: V7,
}

impl SurfaceGeometry for FlatSurface {
    fn inward_normal(&self, _x: &V7) -> V7 {
        self.normal
    }
    fn distance(&self, x: &V7) -> f64 {
        (x - self.origin).dot(&self.normal).abs()
    }
    fn principal_curvatures(&self, _x: &V7) -> [f64; 2] {
        [0.0, 0.0]
    }
}

/// Geometry of a disjoint union; each query goes to the nearest piece.
struct UnionSurface {
    pieces: Vec<Arc<dyn SurfaceGeometry>>,
}

impl UnionSurface {
    fn piece(&self, x: &V7) -> &dyn SurfaceGeometry {
        self.pieces
            .iter()
            .min_by(|a, b| a.distance(x).total_cmp(&b.distance(x)))
            .expect("union has pieces")
            .as_ref()
    }
}

impl SurfaceGeometry for UnionSurface {
    fn inward_normal(&self, x: &V7) -> V7 {
        self.piece(x).inward_normal(x)
    }
    fn principal_curvatures(&self, x: &V7) -> [f64; 2] {
        self.piece(x).principal_curvatures(x)
    }
    fn distance(&self, x: &V7) -> f64 {
        self.piece(x).distance(x)
    }
}

/// Closed oriented triangle mesh of `∂Y`.
#[derive(Clone)]
pub struct SurfaceMesh {
    vertices: Vec<V7>,
    faces: Vec<[usize; 3]>,
    normals: Vec<V7>,
    /// Orthonormal basis of the associative 3-space containing `Y`.
    frame: [V7; 3],
    /// Periodic translations for meshes of flat tori.
    lattice: Vec<V7>,
    geometry: Option<Arc<dyn SurfaceGeometry>>,
    structure: G2Structure<f64>,
    neighbors: Vec<Vec<usize>>,
}

impl std::fmt::Debug for SurfaceMesh {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SurfaceMesh").field("vertices", &self.vertices.len()).field("faces", &self.faces.len()).finish()
    }
}

fn standard_frame() -> [V7; 3] {
    [axis(0), axis(1), axis(2)]
}

impl SurfaceMesh {
    /// Validates closedness and orients every face so that `(a, b)` edge
    /// vectors satisfy `⟨n×a, b⟩ > 0`, i.e. `∂Y` carries the orientation of
    /// `(v, n×v)`.
    pub fn new(
        vertices: Vec<V7>,
        faces: Vec<[usize; 3]>,
        normals: Vec<V7>,
        frame: [V7; 3],
        structure: G2Structure<f64>,
    ) -> Result<Self> {
        Self::with_lattice(vertices, faces, normals, frame, Vec::new(), structure)
    }

    fn with_lattice(
        vertices: Vec<V7>,
        faces: Vec<[usize; 3]>,
        normals: Vec<V7>,
        frame: [V7; 3],
        lattice: Vec<V7>,
        structure: G2Structure<f64>,
    ) -> Result<Self> {
        if vertices.len() != normals.len() {
            return Err(Error::InvalidInput("one normal per vertex required".into()));
        }
        if faces.iter().flatten().any(|&i| i >= vertices.len()) {
            return Err(Error::InvalidInput("face index out of range".into()));
        }
        let defect = (cross(&structure, &frame[0], &frame[1]) - frame[2]).norm();
        if defect > 1e-10 {
            return Err(Error::InvalidFrame("surface must lie in an associative 3-space".into()));
        }
        let normals: Vec<V7> = normals.iter().map(|n| n.normalize()).collect();
        let mut mesh = Self { vertices, faces, normals, frame, lattice, geometry: None, structure, neighbors: Vec::new() };
        mesh.faces = orient_consistently(&mesh.faces)?;
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for f in &mesh.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let mut nb = vec![BTreeSet::new(); mesh.vertices.len()];
        for &(a, b) in &edges {
            nb[a].insert(b);
            nb[b].insert(a);
        }
        mesh.neighbors = nb.into_iter().map(|s| s.into_iter().collect()).collect();
        // One global flip per component, decided by the area-weighted vote of
        // `⟨n×a, b⟩`; single sliver faces cannot override their neighbours.
        let comps = mesh.components();
        let mut label = vec![0usize; mesh.vertices.len()];
        for (c, vs) in comps.iter().enumerate() {
            for &v in vs {
                label[v] = c;
            }
        }
        let mut vote = vec![0.0; comps.len()];
        for &[a, b, c] in &mesh.faces {
            let n = mesh.normals[a] + mesh.normals[b] + mesh.normals[c];
            vote[label[a]] += cross(&mesh.structure, &n, &mesh.displacement(a, b)).dot(&mesh.displacement(a, c));
        }
        for f in mesh.faces.iter_mut() {
            if vote[label[f[0]]] < 0.0 {
                *f = [f[0], f[2], f[1]];
            }
        }
        Ok(mesh)
    }

    pub fn with_geometry(mut self, geometry: Arc<dyn SurfaceGeometry>) -> Self {
        self.geometry = Some(geometry);
        self
    }

    pub fn geometry(&self) -> Option<&Arc<dyn SurfaceGeometry>> {
        self.geometry.as_ref()
    }

    pub fn structure(&self) -> &G2Structure<f64> {
        &self.structure
    }

    pub fn frame(&self) -> &[V7; 3] {
        &self.frame
    }

    pub fn vertices(&self) -> &[V7] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn normals(&self) -> &[V7] {
        &self.normals
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Vertices within `depth` edges of `i`, excluding `i`.
    pub fn ring(&self, i: usize, depth: usize) -> Vec<usize> {
        let mut seen: BTreeSet<usize> = BTreeSet::from([i]);
        let mut frontier = vec![i];
        for _ in 0..depth {
            let mut next = Vec::new();
            for v in frontier {
                for &w in &self.neighbors[v] {
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        seen.remove(&i);
        seen.into_iter().collect()
    }

    /// `x_j − x_i`, reduced to the shortest periodic image.
    pub fn displacement(&self, i: usize, j: usize) -> V7 {
        let mut d = self.vertices[j] - self.vertices[i];
        for t in &self.lattice {
            let k = (d.dot(t) / t.norm_squared()).round();
            d -= t * k;
        }
        d
    }

    /// `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let edges: usize = self.neighbors.iter().map(|n| n.len()).sum::<usize>() / 2;
        self.vertices.len() as i64 - edges as i64 + self.faces.len() as i64
    }

    /// Connected components as vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.vertices.len()];
        let mut out = Vec::new();
        for s in 0..self.vertices.len() {
            if label[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            let mut comp = Vec::new();
            label[s] = id;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.neighbors[v] {
                    if label[w] == usize::MAX {
                        label[w] = id;
                        stack.push(w);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    /// Genus of each component.
    pub fn component_genera(&self) -> Vec<u32> {
        let comps = self.components();
        let mut label = vec![0; self.vertices.len()];
        for (c, vs) in comps.iter().enumerate() {
            for &v in vs {
                label[v] = c;
            }
        }
        let mut edge_chi = vec![0i64; comps.len()];
        for (v, &c) in label.iter().enumerate() {
            edge_chi[c] += self.neighbors[v].len() as i64;
        }
        let mut face_count = vec![0i64; comps.len()];
        for f in &self.faces {
            face_count[label[f[0]]] += 1;
        }
        comps
            .iter()
            .enumerate()
            .map(|(c, vs)| {
                let chi_c = vs.len() as i64 - edge_chi[c] / 2 + face_count[c];
                ((2 - chi_c) / 2).max(0) as u32
            })
            .collect()
    }

    /// Mean edge length.
    pub fn mesh_size(&self) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                if j > i {
                    total += self.displacement(i, j).norm();
                    count += 1;
                }
            }
        }
        total / count as f64
    }

    /// Orthonormal `(v, w = n×v)` spanning `T_x∂Y`, with `v` the normalised
    /// tangential part of the first frame axis not nearly parallel to `n`.
    pub fn tangent_frame(&self, i: usize) -> (V7, V7) {
        tangent_frame_at(&self.structure, &self.frame, &self.normals[i])
    }

    /// Vector component orthogonal to the 3-space of `Y`.
    pub fn project_normal(&self, v: &V7) -> V7 {
        self.frame.iter().fold(*v, |acc, a| acc - a * a.dot(v))
    }

    /// Applies a rotation of the 3-space (matrix in frame coordinates) to
    /// vertices, normals and geometry-free data.
    pub fn rotated(&self, r: &nalgebra::Matrix3<f64>) -> Result<Self> {
        let map = |x: &V7| {
            let y = nalgebra::Vector3::new(self.frame[0].dot(x), self.frame[1].dot(x), self.frame[2].dot(x));
            let ry = r * y;
            let rest = self.project_normal(x);
            rest + self.frame[0] * ry[0] + self.frame[1] * ry[1] + self.frame[2] * ry[2]
        };
        let vertices = self.vertices.iter().map(map).collect();
        let normals = self.normals.iter().map(map).collect();
        let lattice = self.lattice.iter().map(map).collect();
        Self::with_lattice(vertices, self.faces.clone(), normals, self.frame, lattice, self.structure.clone())
    }

    /// Disjoint union of two meshes in the same 3-space.
    pub fn union(&self, other: &Self) -> Result<Self> {
        let off = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().copied());
        let mut normals = self.normals.clone();
        normals.extend(other.normals.iter().copied());
        let mut faces = self.faces.clone();
        faces.extend(other.faces.iter().map(|f| f.map(|i| i + off)));
        let mut lattice = self.lattice.clone();
        for t in &other.lattice {
            if !lattice.iter().any(|s| (s - t).norm() < 1e-12) {
                lattice.push(*t);
            }
        }
        let mut m = Self::with_lattice(vertices, faces, normals, self.frame, lattice, self.structure.clone())?;
        if let (Some(a), Some(b)) = (&self.geometry, &other.geometry) {
            m.geometry = Some(Arc::new(UnionSurface { pieces: vec![a.clone(), b.clone()] }));
        }
        Ok(m)
    }

    // Constructors.

    /// Subdivided icosahedron on the sphere of radius `radius` in `ℝ³ × {0}`.
    pub fn icosphere(level: usize, radius: f64, structure: &G2Structure<f64>) -> Result<Self> {
        let (pts, faces) = icosphere_points(level);
        let vertices: Vec<V7> = pts.iter().map(|p| lift3(p) * radius).collect();
        let normals = vertices.iter().map(|v| -v.normalize()).collect();
        let geometry = EllipsoidSurface::new(radius, radius, radius, structure);
        Ok(Self::new(vertices, faces, normals, standard_frame(), structure.clone())?.with_geometry(Arc::new(geometry)))
    }

    /// Icosphere mapped onto the ellipsoid with semi-axes `(a, b, c)`.
    pub fn ellipsoid(level: usize, a: f64, b: f64, c: f64, structure: &G2Structure<f64>) -> Result<Self> {
        let (pts, faces) = icosphere_points(level);
        let geometry = EllipsoidSurface::new(a, b, c, structure);
        let vertices: Vec<V7> = pts.iter().map(|p| lift3(&[a * p[0], b * p[1], c * p[2]])).collect();
        let normals = vertices.iter().map(|v| geometry.inward_normal(v)).collect();
        Ok(Self::new(vertices, faces, normals, standard_frame(), structure.clone())?.with_geometry(Arc::new(geometry)))
    }

    /// Torus of revolution about the third axis, `nu × nv` quads.
    pub fn torus_of_revolution(major: f64, minor: f64, nu: usize, nv: usize, structure: &G2Structure<f64>) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut normals = Vec::new();
        let tau = 2.0 * std::f64::consts::PI;
        for i in 0..nu {
            let u = tau * i as f64 / nu as f64;
            for j in 0..nv {
                let v = tau * j as f64 / nv as f64;
                let core = [major * u.cos(), major * u.sin(), 0.0];
                let out = [v.cos() * u.cos(), v.cos() * u.sin(), v.sin()];
                vertices.push(lift3(&std::array::from_fn(|k| core[k] + minor * out[k])));
                normals.push(-lift3(&out));
            }
        }
        let faces = grid_faces(nu, nv);
        let f = move |y: [f64; 3]| ((y[0] * y[0] + y[1] * y[1]).sqrt() - major).powi(2) + y[2] * y[2] - minor * minor;
        let geometry = ImplicitSurface::new(f, standard_frame());
        Ok(Self::new(vertices, faces, normals, standard_frame(), structure.clone())?.with_geometry(Arc::new(geometry)))
    }

    /// Flat torus `{x₁ = offset} × T²` with `n = ±e₁` and periods `e₂, e₃`.
    pub fn flat_torus(n: usize, offset: f64, inward: f64, structure: &G2Structure<f64>) -> Result<Self> {
        let mut vertices = Vec::new();
        for i in 0..n {
            for j in 0..n {
                vertices.push(axis(0) * offset + axis(1) * (i as f64 / n as f64) + axis(2) * (j as f64 / n as f64));
            }
        }
        let normal = axis(0) * inward.signum();
        let normals = vec![normal; vertices.len()];
        let origin = axis(0) * offset;
        let mesh = Self::with_lattice(vertices, grid_faces(n, n), normals, standard_frame(), vec![axis(1), axis(2)], structure.clone())?;
        Ok(mesh.with_geometry(Arc::new(FlatSurface { origin, normal })))
    }

    /// Both boundary tori of the strip `[0, ½] × T²`.
    pub fn strip_boundary(n: usize, structure: &G2Structure<f64>) -> Result<Self> {
        Self::flat_torus(n, 0.0, 1.0, structure)?.union(&Self::flat_torus(n, 0.5, -1.0, structure)?)
    }

    /// Genus-2 surface: a tube of radius `r` about the figure-eight
    /// `y² = x²(1 − x²)`, meshed by marching tetrahedra with spacing `h` and
    /// projected onto the level set.
    pub fn genus_two(h: f64, structure: &G2Structure<f64>) -> Result<Self> {
        Self::genus_two_in(h, standard_frame(), structure)
    }

    pub fn genus_two_in(h: f64, frame: [V7; 3], structure: &G2Structure<f64>) -> Result<Self> {
        let r = 0.15;
        let f = move |y: [f64; 3]| {
            let g = y[0] * y[0] * (1.0 - y[0] * y[0]) - y[1] * y[1];
            g * g + y[2] * y[2] - r * r
        };
        Self::from_implicit(f, [-1.2, -0.8, -0.25], [1.2, 0.8, 0.25], h, frame, structure)
    }

    /// Marching-tetrahedra mesh of `{f = 0}` in the box, projected onto the level set.
    pub fn from_implicit(
        f: impl Fn([f64; 3]) -> f64 + Send + Sync + Clone + 'static,
        lo: [f64; 3],
        hi: [f64; 3],
        h: f64,
        frame: [V7; 3],
        structure: &G2Structure<f64>,
    ) -> Result<Self> {
        let n = std::array::from_fn(|i| ((hi[i] - lo[i]) / h).ceil() as usize);
        let (pts, faces) = marching_tetrahedra(&f, lo, hi, n);
        let surface = ImplicitSurface::new(f, frame);
        let pts: Vec<[f64; 3]> = pts.into_iter().map(|p| surface.project(p)).collect();
        let vertices: Vec<V7> = pts.iter().map(|p| surface.lift(*p)).collect();
        let normals = vertices.iter().map(|v| surface.inward_normal(v)).collect();
        Ok(Self::new(vertices, faces, normals, frame, structure.clone())?.with_geometry(Arc::new(surface)))
    }

    /// Same combinatorics and coordinates placed in another associative 3-space.
    pub fn embedded_in(&self, frame: [V7; 3]) -> Result<Self> {
        let map = |x: &V7| frame[0] * self.frame[0].dot(x) + frame[1] * self.frame[1].dot(x) + frame[2] * self.frame[2].dot(x);
        let vertices = self.vertices.iter().map(map).collect();
        let normals = self.normals.iter().map(map).collect();
        let lattice = self.lattice.iter().map(map).collect();
        Self::with_lattice(vertices, self.faces.clone(), normals, frame, lattice, self.structure.clone())
    }
}

/// Makes adjacent faces traverse their shared edge in opposite directions.
pub(crate) fn orient_consistently(faces: &[[usize; 3]]) -> Result<Vec<[usize; 3]>> {
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            by_edge.entry((a.min(b), a.max(b))).or_default().push(fi);
        }
    }
    if let Some(((a, b), v)) = by_edge.iter().find(|(_, v)| v.len() != 2) {
        return Err(Error::InvalidInput(format!(
            "edge ({a},{b}) is used by {} faces; surface must be closed and manifold",
            v.len()
        )));
    }
    let mut out = faces.to_vec();
    let mut done = vec![false; faces.len()];
    for seed in 0..faces.len() {
        if done[seed] {
            continue;
        }
        done[seed] = true;
        let mut stack = vec![seed];
        while let Some(fi) = stack.pop() {
            let f = out[fi];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                for &g in &by_edge[&(a.min(b), a.max(b))] {
                    if g == fi {
                        continue;
                    }
                    let h = out[g];
                    let same = (0..3).any(|m| h[m] == a && h[(m + 1) % 3] == b);
                    if done[g] {
                        if same {
                            return Err(Error::InvalidInput("surface is not orientable".into()));
                        }
                        continue;
                    }
                    if same {
                        out[g] = [h[0], h[2], h[1]];
                    }
                    done[g] = true;
                    stack.push(g);
                }
            }
        }
    }
    Ok(out)
}

pub(crate) fn tangent_frame_at(structure: &G2Structure<f64>, frame: &[V7; 3], n: &V7) -> (V7, V7) {
    let a = frame.iter().map(|f| (f - n * n.dot(f), f)).max_by(|x, y| x.0.norm().partial_cmp(&y.0.norm()).unwrap()).unwrap().0;
    let v = a.normalize();
    (v, cross(structure, n, &v))
}

fn lift3(p: &[f64; 3]) -> V7 {
    axis(0) * p[0] + axis(1) * p[1] + axis(2) * p[2]
}

fn grid_faces(nu: usize, nv: usize) -> Vec<[usize; 3]> {
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    faces
}

/// Unit icosphere after `level` midpoint subdivisions.
fn icosphere_points(level: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0], [1.0, t, 0.0], [-1.0, -t, 0.0], [1.0, -t, 0.0],
        [0.0, -1.0, t], [0.0, 1.0, t], [0.0, -1.0, -t], [0.0, 1.0, -t],
        [t, 0.0, -1.0], [t, 0.0, 1.0], [-t, 0.0, -1.0], [-t, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    let normalize = |p: [f64; 3]| {
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        p.map(|v| v / n)
    };
    pts = pts.into_iter().map(normalize).collect();
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut m = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                m[k] = *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    let p = normalize(std::array::from_fn(|i| 0.5 * (pts[a][i] + pts[b][i])));
                    pts.push(p);
                    pts.len() - 1
                });
            }
            next.push([f[0], m[0], m[2]]);
            next.push([f[1], m[1], m[0]]);
            next.push([f[2], m[2], m[1]]);
            next.push([m[0], m[1], m[2]]);
        }
        faces = next;
    }
    (pts, faces)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        for level in 0..4 {
            let (p, f) = icosphere_points(level);
            assert_eq!(p.len(), 10 * 4usize.pow(level as u32) + 2);
            assert_eq!(f.len(), 20 * 4usize.pow(level as u32));
        }
    }

    #[test]
    fn periodic_displacement_takes_nearest_image() {
        let m = SurfaceMesh::flat_torus(4, 0.0, 1.0, &G2Structure::standard()).unwrap();
        // Vertex (0, 0) and (3, 3) are diagonal neighbours across the seam.
        let d = m.displacement(0, 15);
        assert!((d - (axis(1) + axis(2)) * -0.25).norm() < 1e-15);
    }

    #[test]
    fn ring_sizes_on_regular_grid() {
        let m = SurfaceMesh::flat_torus(8, 0.0, 1.0, &G2Structure::standard()).unwrap();
        assert_eq!(m.neighbors(0).len(), 6);
        assert_eq!(m.ring(0, 2).len(), 18);
    }
}
