use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::{principal_axes, Mesh};

/// Deletes the `ratio` percent of vertices lying furthest along the principal
/// axis, together with their incident faces. Surviving vertices keep their
/// relative order.
pub fn crop(mesh: &Mesh, ratio: f64) -> Result<Mesh> {
    if !(ratio > 0.0 && ratio < 100.0) {
        return Err(Error::InvalidParameter(format!("crop ratio must lie in (0, 100), got {ratio}")));
    }
    let n = mesh.vertex_count();
    let remove = (ratio / 100.0 * n as f64).round() as usize;
    if remove == 0 {
        return Ok(mesh.clone());
    }
    if n - remove < 3 {
        return Err(Error::TooFewVertices(n - remove));
    }
    let axis = principal_axes(mesh).column(0).into_owned();
    let c = mesh.centroid();
    let proj: Vec<f64> = mesh.vertices().iter().map(|p| (p - c).dot(&axis)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| proj[b].total_cmp(&proj[a]).then(a.cmp(&b)));

    let mut keep = vec![true; n];
    for &v in &order[..remove] {
        keep[v] = false;
    }
    let mut new_index = vec![usize::MAX; n];
    let mut vertices = Vec::with_capacity(n - remove);
    for v in 0..n {
        if keep[v] {
            new_index[v] = vertices.len();
            vertices.push(mesh.vertices()[v]);
        }
    }
    let faces: Vec<_> = mesh
        .faces()
        .iter()
        .filter(|f| f.iter().all(|&v| keep[v]))
        .map(|f| f.map(|v| new_index[v]))
        .collect();
    if faces.is_empty() {
        return Err(Error::InvalidMesh("cropping removed every face".into()));
    }
    Mesh::new(vertices, faces)
}

/// Which storage orders a reordering attack permutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReorderKind {
    /// Vertices only (faces remapped).
    Vertices = 1,
    /// Faces only.
    Faces = 2,
    Both = 3,
}

impl TryFrom<u8> for ReorderKind {
    type Error = Error;
    fn try_from(t: u8) -> Result<Self> {
        match t {
            1 => Ok(Self::Vertices),
            2 => Ok(Self::Faces),
            3 => Ok(Self::Both),
            _ => Err(Error::InvalidParameter(format!("reorder type must be 1, 2 or 3, got {t}"))),
        }
    }
}

/// Vertex and face permutations: new element `i` is old element `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    pub vertices: Vec<usize>,
    pub faces: Vec<usize>,
}

impl Permutation {
    pub fn random(vertex_count: usize, face_count: usize, kind: ReorderKind, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vertices: Vec<usize> = (0..vertex_count).collect();
        let mut faces: Vec<usize> = (0..face_count).collect();
        if matches!(kind, ReorderKind::Vertices | ReorderKind::Both) {
            vertices.shuffle(&mut rng);
        }
        if matches!(kind, ReorderKind::Faces | ReorderKind::Both) {
            faces.shuffle(&mut rng);
        }
        Self { vertices, faces }
    }

    pub fn inverse(&self) -> Self {
        let inv = |p: &[usize]| {
            let mut out = vec![0; p.len()];
            for (i, &j) in p.iter().enumerate() {
                out[j] = i;
            }
            out
        };
        Self { vertices: inv(&self.vertices), faces: inv(&self.faces) }
    }

    /// Panics if the permutation sizes do not match the mesh.
    pub fn apply(&self, mesh: &Mesh) -> Mesh {
        assert_eq!(self.vertices.len(), mesh.vertex_count());
        assert_eq!(self.faces.len(), mesh.face_count());
        let old_to_new = self.inverse().vertices;
        let vertices = self.vertices.iter().map(|&v| mesh.vertices()[v]).collect();
        let faces = self.faces.iter().map(|&f| mesh.faces()[f].map(|v| old_to_new[v])).collect();
        Mesh::new(vertices, faces).expect("permuting a valid mesh keeps it valid")
    }
}

pub fn reorder_elements(mesh: &Mesh, kind: ReorderKind, seed: u64) -> Mesh {
    Permutation::random(mesh.vertex_count(), mesh.face_count(), kind, seed).apply(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;
    use nalgebra::Point3;

    fn segment() -> Mesh {
        let vertices = (0..10).map(|i| Point3::new(i as f64, 0.01 * (i % 2) as f64, 0.0)).collect();
        let faces = (0..8).map(|i| [i, i + 1, i + 2]).collect();
        Mesh::new(vertices, faces).unwrap()
    }

    #[test]
    fn crop_removes_the_far_end() {
        let m = segment();
        let c = crop(&m, 30.0).unwrap();
        assert_eq!(c.vertex_count(), 7);
        assert!(c.vertices().iter().all(|p| p.x <= 6.0));
        assert_eq!(c.face_count(), 5);
        assert_eq!(crop(&m, 1.0).unwrap(), m);
        assert!(matches!(crop(&m, 80.0), Err(Error::TooFewVertices(2))));
        assert!(crop(&m, 0.0).is_err());
        assert!(crop(&m, 100.0).is_err());
    }

    #[test]
    fn crop_output_is_valid() {
        let m = shapes::torus(20, 10, 1.0, 0.3);
        for ratio in [10.0, 30.0, 50.0] {
            let c = crop(&m, ratio).unwrap();
            let expected = m.vertex_count() - (ratio / 100.0 * m.vertex_count() as f64).round() as usize;
            assert_eq!(c.vertex_count(), expected);
            assert!(c.faces().iter().flatten().all(|&v| v < c.vertex_count()));
        }
    }

    fn sorted_coords(m: &Mesh) -> Vec<[u64; 3]> {
        let mut v: Vec<[u64; 3]> = m.vertices().iter().map(|p| [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()]).collect();
        v.sort();
        v
    }

    #[test]
    fn reorder_types() {
        let m = shapes::torus(8, 6, 1.0, 0.3);
        let t2 = reorder_elements(&m, ReorderKind::Faces, 5);
        assert_eq!(t2.vertices(), m.vertices());
        assert_ne!(t2.faces(), m.faces());
        for kind in [ReorderKind::Vertices, ReorderKind::Faces, ReorderKind::Both] {
            let r = reorder_elements(&m, kind, 9);
            assert_eq!(sorted_coords(&r), sorted_coords(&m));
            assert_eq!(r, reorder_elements(&m, kind, 9));
            let p = Permutation::random(m.vertex_count(), m.face_count(), kind, 9);
            assert_eq!(p.inverse().apply(&p.apply(&m)), m);
        }
        assert!(ReorderKind::try_from(4).is_err());
    }
}
