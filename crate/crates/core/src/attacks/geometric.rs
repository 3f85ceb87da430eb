use std::f64::consts::PI;

use nalgebra::{Matrix3, Point3, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mesh::{bbox_diagonal, Adjacency, Mesh};

fn random_unit_vector(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vector3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Mean distance of the vertices from their centroid; the reference magnitude
/// for noise amplitudes.
pub fn mean_centroid_distance(mesh: &Mesh) -> f64 {
    let c = mesh.centroid();
    mesh.vertices().iter().map(|p| (p - c).norm()).sum::<f64>() / mesh.vertex_count() as f64
}

/// Binary random noise: every vertex moves by exactly
/// `amplitude_percent / 100 * mean_centroid_distance` along a random
/// direction with a random sign.
pub fn add_noise(mesh: &Mesh, amplitude_percent: f64, seed: u64) -> Result<Mesh> {
    if !(amplitude_percent >= 0.0) || !amplitude_percent.is_finite() {
        return Err(Error::InvalidParameter(format!("noise amplitude must be >= 0, got {amplitude_percent}")));
    }
    if amplitude_percent == 0.0 {
        return Ok(mesh.clone());
    }
    let magnitude = amplitude_percent / 100.0 * mean_centroid_distance(mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = mesh
        .vertices()
        .iter()
        .map(|p| {
            let dir = random_unit_vector(&mut rng);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            p + dir * (sign * magnitude)
        })
        .collect();
    Ok(mesh.with_vertices(vertices))
}

/// Uniform-weight Laplacian smoothing with simultaneous (Jacobi) updates.
pub fn laplacian_smooth(mesh: &Mesh, lambda: f64, iterations: usize) -> Result<Mesh> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("smoothing factor must lie in (0, 1), got {lambda}")));
    }
    let adj = Adjacency::build(mesh);
    let mut current = mesh.vertices().to_vec();
    for _ in 0..iterations {
        current = (0..current.len())
            .map(|v| {
                let ring = adj.ring(v);
                if ring.is_empty() {
                    return current[v];
                }
                let mean = ring.iter().fold(Vector3::zeros(), |acc, &u| acc + current[u].coords) / ring.len() as f64;
                current[v] + (mean - current[v].coords) * lambda
            })
            .collect();
    }
    Ok(mesh.with_vertices(current))
}

/// Snaps each coordinate to the nearest of `2^bits` evenly spaced levels
/// spanning that axis's extent (both ends included).
pub fn quantize_coords(mesh: &Mesh, bits: u32) -> Result<Mesh> {
    if !(4..=16).contains(&bits) {
        return Err(Error::InvalidParameter(format!("quantization bits must lie in 4..=16, got {bits}")));
    }
    let (lo, hi) = mesh.bounds();
    let steps = ((1u32 << bits) - 1) as f64;
    let vertices = mesh
        .vertices()
        .iter()
        .map(|p| {
            let mut q = *p;
            for axis in 0..3 {
                let extent = hi[axis] - lo[axis];
                if extent > 0.0 {
                    let k = ((p[axis] - lo[axis]) / extent * steps).round();
                    q[axis] = lo[axis] + k / steps * extent;
                }
            }
            q
        })
        .collect();
    Ok(mesh.with_vertices(vertices))
}

/// `p -> scale * rotation * p + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub rotation: Matrix3<f64>,
    pub scale: f64,
    pub translation: Vector3<f64>,
}

impl Similarity {
    pub fn identity() -> Self {
        Self { rotation: Matrix3::identity(), scale: 1.0, translation: Vector3::zeros() }
    }

    /// Uniformly distributed rotation, scale uniform in `[0.5, 2]`, translation
    /// uniform in a cube of half-extent equal to the mesh's bounding-box
    /// diagonal.
    pub fn random(mesh: &Mesh, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Shoemake's uniform unit quaternion.
        let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
        let q = nalgebra::Quaternion::new(
            a * (2.0 * PI * u2).sin(),
            a * (2.0 * PI * u2).cos(),
            b * (2.0 * PI * u3).sin(),
            b * (2.0 * PI * u3).cos(),
        );
        let rotation = UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner();
        let scale = rng.random_range(0.5..=2.0);
        let h = bbox_diagonal(mesh);
        let translation = Vector3::new(rng.random_range(-h..=h), rng.random_range(-h..=h), rng.random_range(-h..=h));
        Self { rotation, scale, translation }
    }

    pub fn validate(&self) -> Result<()> {
        let err = (self.rotation.transpose() * self.rotation - Matrix3::identity()).norm();
        if err > 1e-9 || self.rotation.determinant() <= 0.0 {
            return Err(Error::InvalidParameter("rotation must be orthonormal with determinant +1".into()));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    pub fn apply_point(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords * self.scale + self.translation)
    }
}

pub fn similarity_transform(mesh: &Mesh, t: &Similarity) -> Result<Mesh> {
    t.validate()?;
    Ok(mesh.with_vertices(mesh.vertices().iter().map(|p| t.apply_point(p)).collect()))
}
