//! Surface distance metrics between two meshes.
//!
//! Both metrics sample the surface of one mesh (every vertex plus
//! `samples_per_triangle` random points per face) and measure the exact
//! distance of each sample to the other surface. The sample sequence of a
//! triangle depends only on the seed and the triangle's geometry, so
//! reordering either mesh does not change the result, and asking for more
//! samples only appends to the sequence.

mod bvh;

use nalgebra::Point3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use crate::watermark::{correlation, Correlation};
pub use bvh::{closest_point_on_triangle, TriangleBvh};

use crate::mesh::Mesh;
use crate::watermark::splitmix64;

pub const DEFAULT_SAMPLES_PER_TRIANGLE: usize = 10;

/// Distances from `a` to `b` and back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceReport {
    pub rms_a_to_b: f64,
    pub rms_b_to_a: f64,
    /// `max(rms_a_to_b, rms_b_to_a)`.
    pub mrms: f64,
    /// Largest sampled distance in either direction.
    pub hausdorff: f64,
    pub sample_count: usize,
}

pub fn point_to_surface_distance(p: &Point3<f64>, accel: &TriangleBvh) -> f64 {
    accel.distance(p)
}

fn triangle_seed(seed: u64, tri: &[Point3<f64>; 3]) -> u64 {
    // Rotate the corners so the lexicographically smallest comes first; this
    // keeps the orientation and makes the seed independent of index order.
    let key = |p: &Point3<f64>| [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()];
    let first = (0..3).min_by_key(|&i| key(&tri[i])).unwrap();
    let mut h = splitmix64(seed);
    for k in 0..3 {
        for bits in key(&tri[(first + k) % 3]) {
            h = splitmix64(h ^ bits);
        }
    }
    h
}

/// Vertices of `mesh` followed by `samples_per_triangle` uniformly
/// distributed points on each face.
pub fn sample_surface(mesh: &Mesh, samples_per_triangle: usize, seed: u64) -> Vec<Point3<f64>> {
    let mut out = mesh.vertices().to_vec();
    let per_face: Vec<Vec<Point3<f64>>> = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| {
            let tri = mesh.face_points(f);
            let mut rng = ChaCha8Rng::seed_from_u64(triangle_seed(seed, &tri));
            (0..samples_per_triangle)
                .map(|_| {
                    let (r1, r2): (f64, f64) = (rng.random(), rng.random());
                    let s = r1.sqrt();
                    let (u, v, w) = (1.0 - s, s * (1.0 - r2), s * r2);
                    Point3::from(tri[0].coords * u + tri[1].coords * v + tri[2].coords * w)
                })
                .collect()
        })
        .collect();
    out.extend(per_face.into_iter().flatten());
    out
}

/// Squared distances of the samples of `a` to `b`, sorted ascending so
/// that reductions do not depend on sample order.
fn one_sided(a: &Mesh, b: &Mesh, samples_per_triangle: usize, seed: u64) -> Vec<f64> {
    let accel = TriangleBvh::build(b);
    let mut d: Vec<f64> =
        sample_surface(a, samples_per_triangle, seed).par_iter().map(|p| accel.distance_squared(p)).collect();
    d.sort_by(f64::total_cmp);
    d
}

fn rms(sorted_sq: &[f64]) -> f64 {
    (sorted_sq.iter().sum::<f64>() / sorted_sq.len() as f64).sqrt()
}

/// Symmetric sampled RMS surface distance.
pub fn mrms(a: &Mesh, b: &Mesh, samples_per_triangle: usize, seed: u64) -> DistanceReport {
    let ab = one_sided(a, b, samples_per_triangle, seed);
    let ba = one_sided(b, a, samples_per_triangle, seed);
    let (rms_a_to_b, rms_b_to_a) = (rms(&ab), rms(&ba));
    let hausdorff = ab.last().copied().unwrap_or(0.0).max(ba.last().copied().unwrap_or(0.0)).sqrt();
    DistanceReport {
        rms_a_to_b,
        rms_b_to_a,
        mrms: rms_a_to_b.max(rms_b_to_a),
        hausdorff,
        sample_count: ab.len() + ba.len(),
    }
}

/// Symmetric sampled Hausdorff distance.
pub fn hausdorff(a: &Mesh, b: &Mesh, samples_per_triangle: usize, seed: u64) -> f64 {
    mrms(a, b, samples_per_triangle, seed).hausdorff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attacks::{add_noise, reorder_elements, ReorderKind};
    use crate::shapes;
    use nalgebra::Vector3;

    fn shifted(m: &Mesh, d: Vector3<f64>) -> Mesh {
        m.with_vertices(m.vertices().iter().map(|p| p + d).collect())
    }

    #[test]
    fn identical_meshes_have_zero_distance() {
        let m = shapes::torus(16, 8, 1.0, 0.3);
        let r = mrms(&m, &m, 10, 1);
        assert!(r.mrms < 1e-12 && r.hausdorff < 1e-12);
        assert_eq!(r.sample_count, 2 * (m.vertex_count() + 10 * m.face_count()));
    }

    #[test]
    fn plane_offset() {
        let g = shapes::grid(10, 10, 1.0);
        let d = 0.0123;
        let r = mrms(&g, &shifted(&g, Vector3::new(0.0, 0.0, d)), 10, 3);
        assert!((r.mrms - d).abs() < 0.01 * d);
        assert!((r.hausdorff - d).abs() < 0.01 * d);
    }

    #[test]
    fn symmetric_and_bounded_by_hausdorff() {
        let a = shapes::bumpy_sphere(3, 0.2, 2);
        let b = add_noise(&a, 0.5, 4).unwrap();
        let ab = mrms(&a, &b, 5, 9);
        let ba = mrms(&b, &a, 5, 9);
        assert_eq!(ab.mrms, ba.mrms);
        assert_eq!(ab.hausdorff, ba.hausdorff);
        assert!(ab.hausdorff >= ab.mrms);
        assert!(ab.mrms > 0.0);
    }

    #[test]
    fn reordering_either_argument_changes_nothing() {
        let a = shapes::bumpy_sphere(3, 0.2, 2);
        let b = add_noise(&a, 0.5, 4).unwrap();
        let base = mrms(&a, &b, 5, 9);
        let ra = reorder_elements(&a, ReorderKind::Both, 1);
        let rb = reorder_elements(&b, ReorderKind::Both, 2);
        assert_eq!(mrms(&ra, &rb, 5, 9), base);
    }

    #[test]
    fn refinement_never_lowers_hausdorff() {
        let a = shapes::torus(24, 12, 1.0, 0.4);
        let b = add_noise(&a, 1.0, 5).unwrap();
        let mut prev = 0.0;
        for k in [0, 1, 4, 10, 20] {
            let h = hausdorff(&a, &b, k, 13);
            assert!(h >= prev);
            prev = h;
        }
    }

    #[test]
    fn metrics_scale_linearly() {
        let a = shapes::torus(24, 12, 1.0, 0.4);
        let b = add_noise(&a, 1.0, 5).unwrap();
        let s = 2.0;
        let scale = |m: &Mesh| m.with_vertices(m.vertices().iter().map(|p| p * s).collect());
        let r1 = mrms(&a, &b, 4, 1);
        // Scaled triangles draw different (geometry-keyed) samples, so compare
        // statistically rather than bitwise.
        let r2 = mrms(&scale(&a), &scale(&b), 4, 1);
        assert!((r2.mrms / r1.mrms - s).abs() < 0.05 * s);
        assert!(r2.hausdorff / r1.hausdorff > 0.8 * s && r2.hausdorff / r1.hausdorff < 1.2 * s);
    }
}
