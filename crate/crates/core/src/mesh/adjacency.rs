use std::collections::HashMap;

use nalgebra::Vector3;

use super::Mesh;

/// Vertex and edge neighborhoods of a mesh, plus area-weighted vertex normals.
///
/// Rings and incident-face lists are sorted ascending so every traversal has a
/// fixed order.
#[derive(Debug, Clone)]
pub struct Adjacency {
    rings: Vec<Vec<usize>>,
    vertex_faces: Vec<Vec<usize>>,
    edge_faces: HashMap<(usize, usize), Vec<usize>>,
    normals: Vec<Vector3<f64>>,
    boundary: Vec<bool>,
    /// Vertices not referenced by any face.
    pub isolated: Vec<usize>,
    /// Faces with zero area; they are left out of the normals.
    pub degenerate_faces: Vec<usize>,
    /// Edges shared by more than two faces.
    pub non_manifold_edges: Vec<(usize, usize)>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Adjacency {
    pub fn build(mesh: &Mesh) -> Self {
        let n = mesh.vertex_count();
        let mut rings = vec![Vec::new(); n];
        let mut vertex_faces = vec![Vec::new(); n];
        let mut edge_faces: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut acc = vec![Vector3::zeros(); n];
        let mut degenerate_faces = Vec::new();

        for (fi, f) in mesh.faces().iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                rings[a].push(b);
                rings[b].push(a);
                vertex_faces[f[k]].push(fi);
                edge_faces.entry(key(a, b)).or_default().push(fi);
            }
            let [p0, p1, p2] = mesh.face_points(fi);
            // Cross product length is twice the area, so summing it weights by area.
            let cross = (p1 - p0).cross(&(p2 - p0));
            if cross.norm() == 0.0 {
                degenerate_faces.push(fi);
                continue;
            }
            for &v in f {
                acc[v] += cross;
            }
        }
        for r in &mut rings {
            r.sort_unstable();
            r.dedup();
        }
        for vf in &mut vertex_faces {
            vf.sort_unstable();
            vf.dedup();
        }
        let normals = acc
            .into_iter()
            .map(|s| if s.norm() > 0.0 { s.normalize() } else { Vector3::zeros() })
            .collect();

        let mut boundary = vec![false; n];
        let mut non_manifold_edges = Vec::new();
        for (&(a, b), fs) in &edge_faces {
            if fs.len() == 1 {
                boundary[a] = true;
                boundary[b] = true;
            } else if fs.len() > 2 {
                non_manifold_edges.push((a, b));
            }
        }
        non_manifold_edges.sort_unstable();
        let isolated = (0..n).filter(|&v| rings[v].is_empty()).collect();

        Self {
            rings,
            vertex_faces,
            edge_faces,
            normals,
            boundary,
            isolated,
            degenerate_faces,
            non_manifold_edges,
        }
    }

    /// One-ring neighbors of `v`, ascending.
    pub fn ring(&self, v: usize) -> &[usize] {
        &self.rings[v]
    }

    pub fn incident_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    /// Faces sharing the edge `(a, b)`, in face order. Empty if not an edge.
    pub fn edge_faces(&self, a: usize, b: usize) -> &[usize] {
        self.edge_faces.get(&key(a, b)).map_or(&[], |v| v.as_slice())
    }

    /// Unit area-weighted normal; the zero vector when every incident face is
    /// degenerate or the vertex is isolated.
    pub fn normal(&self, v: usize) -> Vector3<f64> {
        self.normals[v]
    }

    /// True when `v` lies on an edge with exactly one incident face.
    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn is_closed_manifold(&self) -> bool {
        self.non_manifold_edges.is_empty() && !self.boundary.iter().any(|&b| b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use nalgebra::Point3;

    #[test]
    fn single_triangle() {
        let m = Mesh::new(
            vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let adj = Adjacency::build(&m);
        assert_eq!(adj.ring(0), &[1, 2]);
        assert!((adj.normal(0) - Vector3::z()).norm() < 1e-15);
        assert!(adj.is_boundary(0));
    }

    #[test]
    fn tetrahedron_rings_are_complete() {
        let m = shapes::tetrahedron();
        let adj = Adjacency::build(&m);
        for v in 0..4 {
            assert_eq!(adj.ring(v).len(), 3);
            assert!(!adj.is_boundary(v));
        }
        assert!(adj.is_closed_manifold());
    }

    #[test]
    fn grid_interior_has_valence_six() {
        let m = shapes::grid(6, 6, 1.0);
        let adj = Adjacency::build(&m);
        // Brute-force count over the face list for one interior vertex.
        let v = 3 * 7 + 3;
        let mut nbrs: Vec<usize> = m
            .faces()
            .iter()
            .filter(|f| f.contains(&v))
            .flat_map(|f| f.iter().copied())
            .filter(|&u| u != v)
            .collect();
        nbrs.sort_unstable();
        nbrs.dedup();
        assert_eq!(nbrs.len(), 6);
        assert_eq!(adj.ring(v), nbrs.as_slice());
    }

    #[test]
    fn isolated_and_degenerate_are_flagged() {
        let m = Mesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(2.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
                Point3::new(5.0, 5.0, 5.0),
            ],
            vec![[0, 1, 2], [0, 1, 3]],
        )
        .unwrap();
        let adj = Adjacency::build(&m);
        assert_eq!(adj.isolated, vec![4]);
        assert_eq!(adj.degenerate_faces, vec![0]);
        assert!((adj.normal(2)).norm() == 0.0);
        assert!((adj.normal(0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rings_are_symmetric_and_normals_unit() {
        let m = shapes::bumpy_sphere(3, 0.2, 5);
        let adj = Adjacency::build(&m);
        for v in 0..m.vertex_count() {
            for &u in adj.ring(v) {
                assert!(adj.ring(u).binary_search(&v).is_ok());
            }
            for &f in adj.incident_faces(v) {
                assert!(m.faces()[f].contains(&v));
            }
            assert!((adj.normal(v).norm() - 1.0).abs() < 1e-9);
        }
    }
}
