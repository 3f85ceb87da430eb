use nalgebra::{Point3, Vector3};

use super::Mesh;
use crate::error::{Error, Result};

/// Maps a mesh into its canonical frame: centroid at the origin and mean
/// vertex norm equal to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationTransform {
    pub centroid: Vector3<f64>,
    pub scale: f64,
}

impl NormalizationTransform {
    pub fn identity() -> Self {
        Self { centroid: Vector3::zeros(), scale: 1.0 }
    }

    /// Original coordinates to canonical coordinates.
    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from((p.coords - self.centroid) / self.scale)
    }

    /// Canonical coordinates back to original coordinates.
    pub fn invert(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(p.coords * self.scale + self.centroid)
    }
}

/// Centers the mesh on its vertex centroid and scales it to unit mean vertex
/// norm. Faces are untouched.
pub fn normalize(mesh: &Mesh) -> Result<(Mesh, NormalizationTransform)> {
    let centroid = mesh.centroid().coords;
    let n = mesh.vertex_count() as f64;
    let scale = mesh.vertices().iter().map(|p| (p.coords - centroid).norm()).sum::<f64>() / n;
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::DegenerateMesh);
    }
    let t = NormalizationTransform { centroid, scale };
    let vertices = mesh.vertices().iter().map(|p| t.apply(p)).collect();
    Ok((mesh.with_vertices(vertices), t))
}

pub fn denormalize(mesh: &Mesh, t: &NormalizationTransform) -> Mesh {
    mesh.with_vertices(mesh.vertices().iter().map(|p| t.invert(p)).collect())
}
