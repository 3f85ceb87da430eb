//! Midpoint, Loop and sqrt(3) subdivision.
//!
//! New vertices are appended after the original ones. Midpoint and Loop
//! split every triangle into four (`V -> V + E`, `F -> 4F`); sqrt(3) inserts
//! one vertex per face and flips the original edges (`V -> V + F`, `F -> 3F`
//! on closed meshes).

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};
use crate::mesh::{Adjacency, Face, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubdivisionScheme {
    Midpoint,
    Loop,
    Sqrt3,
}

impl SubdivisionScheme {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Midpoint => "midpoint",
            Self::Loop => "loop",
            Self::Sqrt3 => "sqrt3",
        }
    }
}

pub fn subdivide(mesh: &Mesh, scheme: SubdivisionScheme, iterations: usize) -> Result<Mesh> {
    if iterations == 0 {
        return Err(Error::InvalidParameter("subdivision needs at least one iteration".into()));
    }
    let mut m = mesh.clone();
    for _ in 0..iterations {
        m = match scheme {
            SubdivisionScheme::Midpoint => split_four(&m, false)?,
            SubdivisionScheme::Loop => split_four(&m, true)?,
            SubdivisionScheme::Sqrt3 => sqrt3_step(&m)?,
        };
    }
    Ok(m)
}

pub fn subdivide_midpoint(mesh: &Mesh, iterations: usize) -> Result<Mesh> {
    subdivide(mesh, SubdivisionScheme::Midpoint, iterations)
}

pub fn subdivide_loop(mesh: &Mesh, iterations: usize) -> Result<Mesh> {
    subdivide(mesh, SubdivisionScheme::Loop, iterations)
}

pub fn subdivide_sqrt3(mesh: &Mesh, iterations: usize) -> Result<Mesh> {
    subdivide(mesh, SubdivisionScheme::Sqrt3, iterations)
}

fn require_manifold(adj: &Adjacency) -> Result<()> {
    match adj.non_manifold_edges.first() {
        Some(&(a, b)) => Err(Error::NonManifoldEdge(a, b)),
        None => Ok(()),
    }
}

fn boundary_neighbors(adj: &Adjacency, v: usize) -> Vec<usize> {
    adj.ring(v).iter().copied().filter(|&u| adj.edge_faces(v, u).len() == 1).collect()
}

fn opposite(face: &Face, a: usize, b: usize) -> usize {
    *face.iter().find(|&&x| x != a && x != b).expect("triangle has a third vertex")
}

fn split_four(mesh: &Mesh, smooth: bool) -> Result<Mesh> {
    let adj = Adjacency::build(mesh);
    if smooth {
        require_manifold(&adj)?;
    }
    let verts = mesh.vertices();
    let edges = mesh.edges();
    let n = verts.len();
    let edge_index: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, n + i)).collect();

    let mut out: Vec<Point3<f64>> = Vec::with_capacity(n + edges.len());
    if smooth {
        for v in 0..n {
            let ring = adj.ring(v);
            let p = verts[v].coords;
            let q = if ring.is_empty() {
                p
            } else if adj.is_boundary(v) {
                let bn = boundary_neighbors(&adj, v);
                if bn.len() == 2 {
                    p * 0.75 + (verts[bn[0]].coords + verts[bn[1]].coords) * 0.125
                } else {
                    p
                }
            } else {
                let k = ring.len() as f64;
                let c = 0.375 + 0.25 * (2.0 * PI / k).cos();
                let beta = (0.625 - c * c) / k;
                let sum = ring.iter().fold(Vector3::zeros(), |acc, &u| acc + verts[u].coords);
                p * (1.0 - k * beta) + sum * beta
            };
            out.push(Point3::from(q));
        }
    } else {
        out.extend_from_slice(verts);
    }
    for &(a, b) in &edges {
        let mid = (verts[a].coords + verts[b].coords) * 0.5;
        let faces = adj.edge_faces(a, b);
        let p = if smooth && faces.len() == 2 {
            let c = opposite(&mesh.faces()[faces[0]], a, b);
            let d = opposite(&mesh.faces()[faces[1]], a, b);
            (verts[a].coords + verts[b].coords) * 0.375 + (verts[c].coords + verts[d].coords) * 0.125
        } else {
            mid
        };
        out.push(Point3::from(p));
    }

    let e = |a: usize, b: usize| edge_index[&(a.min(b), a.max(b))];
    let mut faces = Vec::with_capacity(mesh.face_count() * 4);
    for &[a, b, c] in mesh.faces() {
        let (ab, bc, ca) = (e(a, b), e(b, c), e(c, a));
        faces.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
    }
    Mesh::new(out, faces)
}

fn has_directed(face: &Face, a: usize, b: usize) -> bool {
    (0..3).any(|k| face[k] == a && face[(k + 1) % 3] == b)
}

fn sqrt3_step(mesh: &Mesh) -> Result<Mesh> {
    let adj = Adjacency::build(mesh);
    require_manifold(&adj)?;
    let verts = mesh.vertices();
    let n = verts.len();

    let mut out: Vec<Point3<f64>> = Vec::with_capacity(n + mesh.face_count());
    for v in 0..n {
        let ring = adj.ring(v);
        // Boundary vertices are kept in place.
        if ring.is_empty() || adj.is_boundary(v) {
            out.push(verts[v]);
            continue;
        }
        let k = ring.len() as f64;
        let alpha = (4.0 - 2.0 * (2.0 * PI / k).cos()) / 9.0;
        let mean = ring.iter().fold(Vector3::zeros(), |acc, &u| acc + verts[u].coords) / k;
        out.push(Point3::from(verts[v].coords * (1.0 - alpha) + mean * alpha));
    }
    for &[a, b, c] in mesh.faces() {
        out.push(Point3::from((verts[a].coords + verts[b].coords + verts[c].coords) / 3.0));
    }

    let mut faces = Vec::with_capacity(mesh.face_count() * 3);
    for (a, b) in mesh.edges() {
        let fs = adj.edge_faces(a, b);
        match fs {
            [f] => {
                let face = &mesh.faces()[*f];
                let (x, y) = if has_directed(face, a, b) { (a, b) } else { (b, a) };
                faces.push([x, y, n + f]);
            }
            [f1, f2] => {
                // m1 lies on the side where the edge runs x -> y.
                let (x, y) = if has_directed(&mesh.faces()[*f1], a, b) { (a, b) } else { (b, a) };
                let (m1, m2) = (n + f1, n + f2);
                faces.push([x, m2, m1]);
                faces.push([m2, y, m1]);
            }
            _ => unreachable!("manifold edges have one or two faces"),
        }
    }
    Mesh::new(out, faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn midpoint_counts_and_geometry() {
        let t = Mesh::new(
            vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let s = subdivide_midpoint(&t, 1).unwrap();
        assert_eq!((s.vertex_count(), s.face_count()), (6, 4));
        // New vertices lie on the old edges: the triangle x, y >= 0, x + y <= 1.
        for p in &s.vertices()[3..] {
            assert!(p.x >= 0.0 && p.y >= 0.0 && (p.x + p.y - 1.0).abs() < 1e-15 || p.x == 0.0 || p.y == 0.0);
        }
        let m = shapes::icosphere(2);
        let e = m.edges().len();
        let s = subdivide_midpoint(&m, 1).unwrap();
        assert_eq!(s.vertex_count(), m.vertex_count() + e);
        assert_eq!(s.face_count(), 4 * m.face_count());
        assert_eq!(&s.vertices()[..m.vertex_count()], m.vertices());
    }

    #[test]
    fn loop_approaches_the_sphere() {
        let m = shapes::icosphere(1);
        let s = subdivide_loop(&m, 1).unwrap();
        assert_eq!(s.face_count(), 4 * m.face_count());
        assert!(Adjacency::build(&s).is_closed_manifold());
        // Loop shrinks a coarse sphere, so compare the relative spread of
        // vertex radii against plain midpoint splitting.
        let spread = |m: &Mesh| {
            let r: Vec<f64> = m.vertices().iter().map(|p| p.coords.norm()).collect();
            let mean = r.iter().sum::<f64>() / r.len() as f64;
            (r.iter().copied().fold(f64::NEG_INFINITY, f64::max) - r.iter().copied().fold(f64::INFINITY, f64::min)) / mean
        };
        let mid = subdivide_midpoint(&m, 1).unwrap();
        assert!(spread(&s) < spread(&mid));
        let s2 = subdivide_loop(&m, 2).unwrap();
        assert!(spread(&s2) < spread(&subdivide_midpoint(&m, 2).unwrap()));
    }

    #[test]
    fn sqrt3_counts_and_manifoldness() {
        let m = shapes::icosphere(2);
        let s = subdivide_sqrt3(&m, 1).unwrap();
        assert_eq!(s.vertex_count(), m.vertex_count() + m.face_count());
        assert_eq!(s.face_count(), 3 * m.face_count());
        let adj = Adjacency::build(&s);
        assert!(adj.is_closed_manifold());
        // Consistent outward orientation survives the edge flips.
        for (v, p) in s.vertices().iter().enumerate() {
            assert!(adj.normal(v).dot(&p.coords) > 0.0);
        }
        let s2 = subdivide_sqrt3(&m, 2).unwrap();
        assert_eq!(s2.face_count(), 9 * m.face_count());
    }

    #[test]
    fn open_meshes_stay_in_their_plane() {
        let g = shapes::grid(6, 6, 1.0);
        let adj = Adjacency::build(&g);
        for scheme in [SubdivisionScheme::Loop, SubdivisionScheme::Sqrt3, SubdivisionScheme::Midpoint] {
            let s = subdivide(&g, scheme, 1).unwrap();
            assert!(s.vertices().iter().all(|p| p.z == 0.0 && p.x.abs() <= 0.5 && p.y.abs() <= 0.5));
            if scheme != SubdivisionScheme::Loop {
                for v in (0..g.vertex_count()).filter(|&v| adj.is_boundary(v)) {
                    assert_eq!(s.vertices()[v], g.vertices()[v]);
                }
            }
        }
    }

    #[test]
    fn non_manifold_edges_rejected_by_smooth_schemes() {
        let m = Mesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
                Point3::new(0.0, -1.0, 0.0),
                Point3::new(0.0, 0.0, 1.0),
            ],
            vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]],
        )
        .unwrap();
        assert!(matches!(subdivide_loop(&m, 1), Err(Error::NonManifoldEdge(0, 1))));
        assert!(matches!(subdivide_sqrt3(&m, 1), Err(Error::NonManifoldEdge(0, 1))));
        assert_eq!(subdivide_midpoint(&m, 1).unwrap().face_count(), 12);
    }
}
