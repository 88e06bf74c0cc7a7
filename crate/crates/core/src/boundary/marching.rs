//! Marching tetrahedra on a regular grid, using the six-tetrahedron Kuhn
//! split of each cube so that neighbouring cubes share faces conformingly.

use std::collections::HashMap;

const CORNERS: [[usize; 3]; 8] = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]];
const TETS: [[usize; 4]; 6] = [[0, 5, 1, 6], [0, 1, 2, 6], [0, 2, 3, 6], [0, 3, 7, 6], [0, 7, 4, 6], [0, 4, 5, 6]];

/// Triangulates `{f = 0}` inside the box `[lo, hi]` sampled on `n` cells per
/// axis. Face orientation is arbitrary. The surface must not touch the box.
pub fn marching_tetrahedra(
    f: &dyn Fn([f64; 3]) -> f64,
    lo: [f64; 3],
    hi: [f64; 3],
    n: [usize; 3],
) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let h: [f64; 3] = std::array::from_fn(|i| (hi[i] - lo[i]) / n[i] as f64);
    let id = |i: usize, j: usize, k: usize| (i * (n[1] + 1) + j) * (n[2] + 1) + k;
    let pos = |i: usize, j: usize, k: usize| [lo[0] + i as f64 * h[0], lo[1] + j as f64 * h[1], lo[2] + k as f64 * h[2]];
    let mut values = vec![0.0; (n[0] + 1) * (n[1] + 1) * (n[2] + 1)];
    for i in 0..=n[0] {
        for j in 0..=n[1] {
            for k in 0..=n[2] {
                let v = f(pos(i, j, k));
                // A node exactly on the level set would create degenerate triangles.
                values[id(i, j, k)] = if v == 0.0 { f64::MIN_POSITIVE } else { v };
            }
        }
    }
    let mut points: Vec<[f64; 3]> = Vec::new();
    let mut edge_vertex: HashMap<(usize, usize), usize> = HashMap::new();
    let mut faces = Vec::new();
    for i in 0..n[0] {
        for j in 0..n[1] {
            for k in 0..n[2] {
                let corner: [(usize, [f64; 3]); 8] = std::array::from_fn(|c| {
                    let [a, b, d] = CORNERS[c];
                    (id(i + a, j + b, k + d), pos(i + a, j + b, k + d))
                });
                for tet in TETS {
                    let verts = tet.map(|c| corner[c]);
                    let inside: Vec<usize> = (0..4).filter(|&t| values[verts[t].0] < 0.0).collect();
                    let outside: Vec<usize> = (0..4).filter(|&t| values[verts[t].0] >= 0.0).collect();
                    let mut cut = |a: usize, b: usize| -> usize {
                        let (ga, gb) = (verts[a].0, verts[b].0);
                        let key = (ga.min(gb), ga.max(gb));
                        *edge_vertex.entry(key).or_insert_with(|| {
                            let (fa, fb) = (values[ga], values[gb]);
                            let t = fa / (fa - fb);
                            points.push(std::array::from_fn(|d| verts[a].1[d] + t * (verts[b].1[d] - verts[a].1[d])));
                            points.len() - 1
                        })
                    };
                    match inside.len() {
                        1 | 3 => {
                            let (lone, rest) = if inside.len() == 1 { (inside[0], outside) } else { (outside[0], inside) };
                            faces.push([cut(lone, rest[0]), cut(lone, rest[1]), cut(lone, rest[2])]);
                        }
                        2 => {
                            let (a, b, c, d) = (inside[0], inside[1], outside[0], outside[1]);
                            let (p, q, r, s) = (cut(a, c), cut(a, d), cut(b, d), cut(b, c));
                            faces.push([p, q, r]);
                            faces.push([p, r, s]);
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    (points, faces)
}
