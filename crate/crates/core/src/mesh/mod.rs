//! Indexed triangle meshes and the geometry shared by every other module.
//!
//! A [`Mesh`] is a list of vertex positions plus a list of faces, each face a
//! triple of 0-based vertex indices. Vertex and face order are preserved by
//! every reader and writer so that element-reordering experiments can be
//! reproduced exactly.

mod adjacency;
mod io;
mod normalize;

pub use adjacency::Adjacency;
pub use io::{parse_obj, parse_off, read_mesh, write_mesh, write_obj, write_off};
pub use normalize::{denormalize, normalize, NormalizationTransform};

use nalgebra::{Matrix3, Point3, SymmetricEigen, Vector3};

use crate::error::{Error, Result};

pub type Face = [usize; 3];

/// An indexed triangle mesh in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point3<f64>>,
    faces: Vec<Face>,
}

impl Mesh {
    /// Builds a mesh after checking the structural invariants: at least three
    /// vertices and one face, finite coordinates, in-range indices and no
    /// face that repeats a vertex.
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<Face>) -> Result<Self> {
        if vertices.len() < 3 || faces.is_empty() {
            return Err(Error::InvalidMesh(format!(
                "need at least 3 vertices and 1 face, got {} and {}",
                vertices.len(),
                faces.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidMesh(format!("vertex {i} has a non-finite coordinate")));
        }
        let n = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&i| i >= n) {
                return Err(Error::InvalidMesh(format!("face {fi} references a missing vertex")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidMesh(format!("face {fi} repeats a vertex")));
            }
        }
        Ok(Self { vertices, faces })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Returns a copy with the same faces and new vertex positions.
    ///
    /// Panics if `vertices` has a different length; positions must stay finite.
    pub fn with_vertices(&self, vertices: Vec<Point3<f64>>) -> Self {
        assert_eq!(vertices.len(), self.vertices.len(), "vertex count must not change");
        Self { vertices, faces: self.faces.clone() }
    }

    pub fn into_parts(self) -> (Vec<Point3<f64>>, Vec<Face>) {
        (self.vertices, self.faces)
    }

    /// Arithmetic mean of the vertex positions.
    pub fn centroid(&self) -> Point3<f64> {
        let sum = self.vertices.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords);
        Point3::from(sum / self.vertices.len() as f64)
    }

    pub fn face_points(&self, f: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Unordered edge list, each edge as `(min, max)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Mean Euclidean distance of the vertices from the origin.
    pub fn mean_vertex_norm(&self) -> f64 {
        self.vertices.iter().map(|p| p.coords.norm()).sum::<f64>() / self.vertices.len() as f64
    }

    /// Minimum and maximum corners of the axis-aligned bounding box.
    pub fn bounds(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for p in &self.vertices[1..] {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (lo, hi)
    }
}

/// Euclidean norm of every vertex, in mesh order.
pub fn vertex_norms(mesh: &Mesh) -> Vec<f64> {
    mesh.vertices.iter().map(|p| p.coords.norm()).collect()
}

/// Scales `v` along its own direction so that its norm becomes `new_norm`.
///
/// Returns `None` for the zero vector, whose direction is undefined; callers
/// leave such vertices in place.
pub fn rescale_vertex(v: &Vector3<f64>, new_norm: f64) -> Option<Vector3<f64>> {
    let norm = v.norm();
    if norm == 0.0 {
        return None;
    }
    Some(v * (new_norm / norm))
}

/// Length of the axis-aligned bounding-box diagonal.
pub fn bbox_diagonal(mesh: &Mesh) -> f64 {
    let (lo, hi) = mesh.bounds();
    (hi - lo).norm()
}

/// Principal axes of the vertex cloud: covariance eigenvectors as matrix
/// columns, ordered by decreasing variance.
///
/// Each axis is oriented so that its largest-magnitude component is positive,
/// which makes the frame deterministic for a given point set.
pub fn principal_axes(mesh: &Mesh) -> Matrix3<f64> {
    let c = mesh.centroid();
    let mut cov = Matrix3::zeros();
    for p in mesh.vertices() {
        let d = p - c;
        cov += d * d.transpose();
    }
    cov /= mesh.vertex_count() as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut axes = Matrix3::zeros();
    for (col, &k) in order.iter().enumerate() {
        let mut axis: Vector3<f64> = eig.eigenvectors.column(k).into_owned();
        let imax = axis.iamax();
        if axis[imax] < 0.0 {
            axis = -axis;
        }
        axes.set_column(col, &axis);
    }
    axes
}

/// Bounding-box diagonal measured in the principal-axis frame.
///
/// Unlike [`bbox_diagonal`] this does not change when the mesh is rotated.
pub fn principal_bbox_diagonal(mesh: &Mesh) -> f64 {
    let axes = principal_axes(mesh);
    let c = mesh.centroid();
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for p in mesh.vertices() {
        let q = axes.transpose() * (p - c);
        lo = lo.inf(&q);
        hi = hi.sup(&q);
    }
    (hi - lo).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tri() -> Mesh {
        Mesh::new(
            vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_meshes() {
        let v = tri().vertices().to_vec();
        assert!(Mesh::new(v.clone(), vec![]).is_err());
        assert!(Mesh::new(v.clone(), vec![[0, 1, 3]]).is_err());
        assert!(Mesh::new(v.clone(), vec![[0, 1, 1]]).is_err());
        let mut bad = v;
        bad[1].x = f64::NAN;
        assert!(Mesh::new(bad, vec![[0, 1, 2]]).is_err());
    }

    #[test]
    fn norms() {
        let m = Mesh::new(
            vec![Point3::new(3.0, 4.0, 0.0), Point3::origin(), Point3::new(1.0, 1.0, 1.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let n = vertex_norms(&m);
        assert_eq!(n[0], 5.0);
        assert_eq!(n[1], 0.0);
        assert_relative_eq!(n[2], 1.7320508075688772, epsilon = 1e-15);
    }

    #[test]
    fn rescale() {
        assert_eq!(rescale_vertex(&Vector3::new(3.0, 4.0, 0.0), 10.0), Some(Vector3::new(6.0, 8.0, 0.0)));
        assert_eq!(rescale_vertex(&Vector3::new(1.0, 0.0, 0.0), 1.0), Some(Vector3::new(1.0, 0.0, 0.0)));
        assert_eq!(rescale_vertex(&Vector3::zeros(), 3.0), None);
        let v = Vector3::new(0.3, -1.7, 2.2);
        let r = rescale_vertex(&v, 0.123).unwrap();
        assert_relative_eq!(r.norm(), 0.123, max_relative = 1e-12);
        assert_relative_eq!(r.normalize(), v.normalize(), epsilon = 1e-15);
    }

    #[test]
    fn cube_diagonal() {
        let corners: Vec<Point3<f64>> = (0..8)
            .map(|i| Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect();
        let m = Mesh::new(corners, vec![[0, 1, 2]]).unwrap();
        assert_relative_eq!(bbox_diagonal(&m), 3f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn principal_axis_of_segment() {
        let pts: Vec<Point3<f64>> = (0..10).map(|i| Point3::new(i as f64, 0.01 * (i % 2) as f64, 0.0)).collect();
        let m = Mesh::new(pts, vec![[0, 1, 2]]).unwrap();
        let axes = principal_axes(&m);
        assert_relative_eq!(axes.column(0).x, 1.0, epsilon = 1e-3);
    }
}
