//! Two-scale mesh saliency.
//!
//! Saliency of a vertex is the absolute difference between Gaussian-weighted
//! averages of mean curvature taken at a fine scale `sigma` and a coarse
//! scale `2 sigma`. The average at scale `s` sums over the vertices closer
//! than `2 s`, with kernel `exp(-d^2 / 2 s^2)`, normalized by the kernel sum:
//!
//! ```text
//! G(v, s) = sum_{x in N(v, 2s)} H(x) exp(-|x-v|^2 / 2s^2) / sum_{x in N(v, 2s)} exp(-|x-v|^2 / 2s^2)
//! S(v)    = | G(v, sigma) - G(v, 2 sigma) |
//! ```
//!
//! Regions of constant curvature therefore have zero saliency; features that
//! stand out from their surroundings score high.

mod curvature;
mod grid;

pub use curvature::{mean_curvature, CurvatureField};

use nalgebra::Point3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{Adjacency, Mesh};
use grid::PointGrid;

/// Per-vertex saliency values and the scale that produced them.
#[derive(Debug, Clone)]
pub struct SaliencyMap {
    pub values: Vec<f64>,
    pub sigma: f64,
    pub curvature: CurvatureField,
}

/// Vertices strictly closer than `radius` to vertex `v`, including `v`, in
/// ascending index order.
pub fn neighborhood(mesh: &Mesh, v: usize, radius: f64) -> Vec<usize> {
    let c = mesh.vertices()[v];
    let r2 = radius * radius;
    (0..mesh.vertex_count())
        .filter(|&i| (mesh.vertices()[i] - c).norm_squared() < r2)
        .collect()
}

fn kernel(d2: f64, sigma: f64) -> f64 {
    (-d2 / (2.0 * sigma * sigma)).exp()
}

/// Gaussian-weighted average of `field` around vertex `v` at scale `sigma`,
/// over the window of radius `2 sigma`.
pub fn gaussian_weighted_average(mesh: &Mesh, field: &[f64], v: usize, sigma: f64) -> f64 {
    let c = mesh.vertices()[v];
    let window = 2.0 * sigma;
    let (mut num, mut den) = (0.0, 0.0);
    for i in neighborhood(mesh, v, window) {
        let w = kernel((mesh.vertices()[i] - c).norm_squared(), sigma);
        num += field[i] * w;
        den += w;
    }
    num / den
}

/// Saliency of every vertex at fine scale `sigma`.
///
/// Window queries go through a uniform hash grid; candidates are summed in
/// ascending index order, so results are bitwise identical to the direct
/// definition and independent of thread count.
pub fn compute_saliency(mesh: &Mesh, sigma: f64) -> Result<SaliencyMap> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("saliency scale must be positive, got {sigma}")));
    }
    let adj = Adjacency::build(mesh);
    let curvature = mean_curvature(mesh, &adj);
    let values = saliency_from_field(mesh.vertices(), &curvature.mean, sigma);
    Ok(SaliencyMap { values, sigma, curvature })
}

fn saliency_from_field(points: &[Point3<f64>], field: &[f64], sigma: f64) -> Vec<f64> {
    let fine_window2 = (2.0 * sigma) * (2.0 * sigma);
    let coarse = 2.0 * sigma;
    let coarse_window = 2.0 * coarse;
    let grid = PointGrid::new(points, coarse_window);
    points
        .par_iter()
        .map_init(Vec::new, |buf, p| {
            grid.within(p, coarse_window, buf);
            let (mut fn_, mut fd, mut cn, mut cd) = (0.0, 0.0, 0.0, 0.0);
            for &(i, d2) in buf.iter() {
                if d2 < fine_window2 {
                    let w = kernel(d2, sigma);
                    fn_ += field[i] * w;
                    fd += w;
                }
                let w = kernel(d2, coarse);
                cn += field[i] * w;
                cd += w;
            }
            (fn_ / fd - cn / cd).abs()
        })
        .collect()
}

/// The `ceil(ratio * n)` most salient vertices, returned in ascending order of
/// vertex norm (ties by index).
///
/// Equal saliency is broken by lower norm first, then lower index.
pub fn select_salient(saliency: &[f64], norms: &[f64], ratio: f64) -> Vec<usize> {
    assert!(ratio > 0.0 && ratio <= 1.0, "ratio must lie in (0, 1]");
    assert_eq!(saliency.len(), norms.len());
    let n = saliency.len();
    // Guard against products like 0.7 * 10 landing a hair above an integer.
    let k = ((ratio * n as f64) - 1e-9).ceil().clamp(0.0, n as f64) as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        saliency[b]
            .total_cmp(&saliency[a])
            .then(norms[a].total_cmp(&norms[b]))
            .then(a.cmp(&b))
    });
    order.truncate(k);
    order.sort_by(|&a, &b| norms[a].total_cmp(&norms[b]).then(a.cmp(&b)));
    order
}
