//! Procedural test meshes.
//!
//! These stand in for scanned models in tests, examples and the bundled
//! benchmark corpus. Every generator is deterministic.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Point3, Vector3};

use crate::mesh::{Face, Mesh};

pub fn tetrahedron() -> Mesh {
    let s = 1.0 / 3f64.sqrt();
    Mesh::new(
        vec![
            Point3::new(s, s, s),
            Point3::new(s, -s, -s),
            Point3::new(-s, s, -s),
            Point3::new(-s, -s, s),
        ],
        vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
    )
    .expect("valid tetrahedron")
}

/// Flat `nx` x `ny` cell grid of side `size` in the z = 0 plane, centered on
/// the origin. Vertex `(i, j)` has index `j * (nx + 1) + i`; faces face +z.
pub fn grid(nx: usize, ny: usize, size: f64) -> Mesh {
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Point3::new(
                size * (i as f64 / nx as f64 - 0.5),
                size * (j as f64 / ny as f64 - 0.5),
                0.0,
            ));
        }
    }
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut faces = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    Mesh::new(vertices, faces).expect("valid grid")
}

/// Unit icosphere: an icosahedron refined `subdivisions` times by edge
/// midpoints projected back onto the sphere. `10 * 4^k + 2` vertices.
pub fn icosphere(subdivisions: u32) -> Mesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3<f64>> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point3::from(Vector3::new(x, y, z).normalize()))
    .collect();
    let mut faces: Vec<Face> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Point3<f64>>| -> usize {
            *cache.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let m = (verts[a].coords + verts[b].coords).normalize();
                verts.push(Point3::from(m));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    Mesh::new(vertices, faces).expect("valid icosphere")
}

/// Icosphere with every vertex pushed radially by a smooth pseudo-random
/// field of relative amplitude `amplitude`. `seed` picks the bump layout.
pub fn bumpy_sphere(subdivisions: u32, amplitude: f64, seed: u64) -> Mesh {
    let base = icosphere(subdivisions);
    let centers: Vec<(Vector3<f64>, f64)> = (0..12u64)
        .map(|k| {
            let h = |salt: u64| {
                let x = crate::watermark::splitmix64(seed.wrapping_mul(31).wrapping_add(k * 7 + salt));
                (x >> 11) as f64 / (1u64 << 53) as f64
            };
            let z = 2.0 * h(1) - 1.0;
            let phi = 2.0 * PI * h(2);
            let r = (1.0 - z * z).sqrt();
            let sign = if h(3) < 0.5 { -1.0 } else { 1.0 };
            (Vector3::new(r * phi.cos(), r * phi.sin(), z), sign)
        })
        .collect();
    let vertices = base
        .vertices()
        .iter()
        .map(|p| {
            let d = p.coords;
            let field: f64 = centers
                .iter()
                .map(|(c, s)| s * (-(d - c).norm_squared() / 0.18).exp())
                .sum::<f64>()
                + 0.5 * (3.0 * d.x).sin() * (2.0 * d.y).cos();
            Point3::from(d * (1.0 + amplitude * field.tanh()))
        })
        .collect();
    base.with_vertices(vertices)
}

/// Torus around the z axis with `major` x `minor` quad cells split into
/// triangles.
pub fn torus(major: usize, minor: usize, major_radius: f64, minor_radius: f64) -> Mesh {
    wavy_torus(major, minor, major_radius, minor_radius, 0.0)
}

/// Torus whose tube radius varies by the relative `amplitude` with both
/// angles, so that vertex distances from the center spread continuously
/// instead of falling on a few rings.
pub fn wavy_torus(major: usize, minor: usize, major_radius: f64, minor_radius: f64, amplitude: f64) -> Mesh {
    let mut vertices = Vec::with_capacity(major * minor);
    for i in 0..major {
        let u = 2.0 * PI * i as f64 / major as f64;
        for j in 0..minor {
            let v = 2.0 * PI * j as f64 / minor as f64;
            let tube = minor_radius * (1.0 + amplitude * (3.0 * u).sin() * (2.0 * v + u).cos());
            let r = major_radius + tube * v.cos();
            vertices.push(Point3::new(r * u.cos(), r * u.sin(), tube * v.sin()));
        }
    }
    let idx = |i: usize, j: usize| (i % major) * minor + (j % minor);
    let mut faces = Vec::with_capacity(2 * major * minor);
    for i in 0..major {
        for j in 0..minor {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    Mesh::new(vertices, faces).expect("valid torus")
}

/// Grid of side 2 displaced along z by a sum of Gaussian bumps `(x, y,
/// height, width)`.
pub fn bumped_grid(n: usize, bumps: &[(f64, f64, f64, f64)]) -> Mesh {
    let flat = grid(n, n, 2.0);
    let vertices = flat
        .vertices()
        .iter()
        .map(|p| {
            let z: f64 = bumps
                .iter()
                .map(|&(x, y, h, w)| h * (-((p.x - x).powi(2) + (p.y - y).powi(2)) / (2.0 * w * w)).exp())
                .sum();
            Point3::new(p.x, p.y, z)
        })
        .collect();
    flat.with_vertices(vertices)
}

/// Flat grid with one narrow bump at `(0.3, -0.2)`; the rest of the surface
/// is exactly planar.
pub fn single_bump(n: usize) -> Mesh {
    let flat = grid(n, n, 2.0);
    let (cx, cy, radius, height) = (0.3, -0.2, 0.25, 0.2);
    let vertices = flat
        .vertices()
        .iter()
        .map(|p| {
            let r = ((p.x - cx).powi(2) + (p.y - cy).powi(2)).sqrt() / radius;
            // Compactly supported smooth bump.
            let z = if r < 1.0 { height * (1.0 - 1.0 / (1.0 - r * r)).exp() } else { 0.0 };
            Point3::new(p.x, p.y, z)
        })
        .collect();
    flat.with_vertices(vertices)
}

/// Center and radius of the bump made by [`single_bump`].
pub const SINGLE_BUMP_CENTER: (f64, f64, f64) = (0.3, -0.2, 0.25);

/// The bundled benchmark corpus: closed and open surfaces of 2k to 10k
/// vertices with wide vertex-norm spreads.
pub fn corpus() -> Vec<(&'static str, Mesh)> {
    vec![
        ("bumpy_sphere", bumpy_sphere(5, 0.5, 11)),
        ("wavy_torus", wavy_torus(96, 48, 1.0, 0.45, 0.25)),
        (
            "bumpy_grid",
            bumped_grid(
                70,
                &[(0.4, 0.3, 0.35, 0.2), (-0.5, -0.2, 0.25, 0.3), (0.1, -0.6, -0.2, 0.15), (-0.3, 0.55, 0.15, 0.1)],
            ),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Adjacency;

    #[test]
    fn icosphere_counts_and_orientation() {
        for k in 0..4 {
            let m = icosphere(k);
            assert_eq!(m.vertex_count(), 10 * 4usize.pow(k) + 2);
            assert_eq!(m.face_count(), 20 * 4usize.pow(k));
            let adj = Adjacency::build(&m);
            assert!(adj.is_closed_manifold());
            for (v, p) in m.vertices().iter().enumerate() {
                assert!(adj.normal(v).dot(&p.coords) > 0.9, "outward normals");
            }
        }
    }

    #[test]
    fn torus_is_closed() {
        let m = torus(16, 8, 1.0, 0.3);
        assert!(Adjacency::build(&m).is_closed_manifold());
        assert_eq!(m.vertex_count(), 128);
    }

    #[test]
    fn corpus_sizes() {
        for (name, m) in corpus() {
            assert!((2000..=10500).contains(&m.vertex_count()), "{name}: {}", m.vertex_count());
        }
    }
}
