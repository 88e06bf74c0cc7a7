//! OFF and OBJ ingestion for triangulated surfaces in `ℝ³ × {0}`.
//!
//! Polygons are fan-triangulated. Vertex normals are area-weighted face
//! normals, flipped to point inward using the sign of the enclosed volume.

use super::mesh::SurfaceMesh;
use crate::error::{Error, Result};
use crate::g2::G2Structure;
use crate::geometry::{axis, V7};
use std::path::Path;

/// Vertex positions and triangles.
pub type Triangles = (Vec<[f64; 3]>, Vec<[usize; 3]>);

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::MeshParse { line, message: message.into() }
}

fn parse_f64(tok: Option<&str>, line: usize) -> Result<f64> {
    let t = tok.ok_or_else(|| parse_err(line, "missing coordinate"))?;
    let v: f64 = t.parse().map_err(|_| parse_err(line, format!("bad number `{t}`")))?;
    if !v.is_finite() {
        return Err(parse_err(line, "non-finite coordinate"));
    }
    Ok(v)
}

fn fan(poly: &[usize], line: usize, faces: &mut Vec<[usize; 3]>) -> Result<()> {
    if poly.len() < 3 {
        return Err(parse_err(line, "face with fewer than three vertices"));
    }
    for k in 1..poly.len() - 1 {
        faces.push([poly[0], poly[k], poly[k + 1]]);
    }
    Ok(())
}

/// Parses OFF text.
pub fn parse_off(text: &str) -> Result<Triangles> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut counts_line = if header == "OFF" {
        lines.next().ok_or_else(|| parse_err(ln, "missing counts"))?
    } else if let Some(rest) = header.strip_prefix("OFF") {
        (ln, rest.trim())
    } else {
        return Err(parse_err(ln, "missing OFF header"));
    };
    if counts_line.1.is_empty() {
        counts_line = lines.next().ok_or_else(|| parse_err(ln, "missing counts"))?;
    }
    let mut it = counts_line.1.split_whitespace();
    let mut count = |what: &str| -> Result<usize> {
        it.next().and_then(|t| t.parse().ok()).ok_or_else(|| parse_err(counts_line.0, format!("bad {what} count")))
    };
    let (nv, nf) = (count("vertex")?, count("face")?);
    let mut verts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of file in vertex list"))?;
        let mut t = l.split_whitespace();
        verts.push([parse_f64(t.next(), ln)?, parse_f64(t.next(), ln)?, parse_f64(t.next(), ln)?]);
    }
    let mut faces = Vec::new();
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of file in face list"))?;
        let mut t = l.split_whitespace();
        let k: usize = t.next().and_then(|s| s.parse().ok()).ok_or_else(|| parse_err(ln, "bad face size"))?;
        let poly: Vec<usize> = (0..k)
            .map(|_| {
                let i: usize = t.next().and_then(|s| s.parse().ok()).ok_or_else(|| parse_err(ln, "bad face index"))?;
                if i >= nv {
                    return Err(parse_err(ln, format!("vertex index {i} out of range")));
                }
                Ok(i)
            })
            .collect::<Result<_>>()?;
        fan(&poly, ln, &mut faces)?;
    }
    Ok((verts, faces))
}

/// Parses the `v` and `f` records of OBJ text; other records are ignored.
pub fn parse_obj(text: &str) -> Result<Triangles> {
    let mut verts = Vec::new();
    let mut polys = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        let mut t = l.split_whitespace();
        match t.next() {
            Some("v") => verts.push([parse_f64(t.next(), ln)?, parse_f64(t.next(), ln)?, parse_f64(t.next(), ln)?]),
            Some("f") => {
                let poly: Vec<i64> = t
                    .map(|s| s.split('/').next().unwrap_or("").parse::<i64>().map_err(|_| parse_err(ln, format!("bad face index `{s}`"))))
                    .collect::<Result<_>>()?;
                polys.push((ln, poly));
            }
            _ => {}
        }
    }
    let nv = verts.len() as i64;
    let mut faces = Vec::new();
    for (ln, poly) in polys {
        let idx: Vec<usize> = poly
            .into_iter()
            .map(|i| {
                let j = if i < 0 { nv + i } else { i - 1 };
                if j < 0 || j >= nv {
                    return Err(parse_err(ln, format!("vertex index {i} out of range")));
                }
                Ok(j as usize)
            })
            .collect::<Result<_>>()?;
        fan(&idx, ln, &mut faces)?;
    }
    Ok((verts, faces))
}

/// Builds a mesh in `ℝ³ × {0}` with estimated inward normals.
pub fn mesh_from_triangles(verts: &[[f64; 3]], faces: &[[usize; 3]], structure: &G2Structure<f64>) -> Result<SurfaceMesh> {
    let p: Vec<V7> = verts.iter().map(|v| axis(0) * v[0] + axis(1) * v[1] + axis(2) * v[2]).collect();
    let tri_normal = |f: &[usize; 3]| (p[f[1]] - p[f[0]]).xyz().cross(&(p[f[2]] - p[f[0]]).xyz());
    let faces = super::mesh::orient_consistently(faces)?;
    let volume: f64 = faces.iter().map(|f| p[f[0]].xyz().dot(&tri_normal(f))).sum::<f64>() / 6.0;
    let sign = if volume > 0.0 { -1.0 } else { 1.0 };
    let mut acc = vec![nalgebra::Vector3::zeros(); p.len()];
    for f in &faces {
        let n = tri_normal(f);
        for &i in f {
            acc[i] += n;
        }
    }
    let normals = acc
        .iter()
        .enumerate()
        .map(|(i, n)| {
            if n.norm() == 0.0 {
                return Err(Error::InvalidInput(format!("vertex {i} has no incident area")));
            }
            let n = n.normalize() * sign;
            Ok(axis(0) * n[0] + axis(1) * n[1] + axis(2) * n[2])
        })
        .collect::<Result<Vec<_>>>()?;
    SurfaceMesh::new(p, faces, normals, [axis(0), axis(1), axis(2)], structure.clone())
}

/// Reads an `.off` or `.obj` file, chosen by extension.
pub fn read_mesh(path: &Path, structure: &G2Structure<f64>) -> Result<SurfaceMesh> {
    let text = std::fs::read_to_string(path)?;
    let (v, f) = match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref() {
        Some("off") => parse_off(&text)?,
        Some("obj") => parse_obj(&text)?,
        _ => return Err(Error::InvalidInput(format!("unsupported mesh format: {}", path.display()))),
    };
    mesh_from_triangles(&v, &f, structure)
}

/// OFF text of the mesh's 3-space coordinates.
pub fn to_off(mesh: &SurfaceMesh) -> String {
    use std::fmt::Write;
    let f = mesh.frame();
    let mut s = format!("OFF\n{} {} 0\n", mesh.vertices().len(), mesh.faces().len());
    for v in mesh.vertices() {
        let _ = writeln!(s, "{:.17e} {:.17e} {:.17e}", f[0].dot(v), f[1].dot(v), f[2].dot(v));
    }
    for t in mesh.faces() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}
