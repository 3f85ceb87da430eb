use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::mesh::{Adjacency, Mesh};

/// Per-vertex curvature estimates, in mesh order.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    /// Mean curvature (average of the principal curvatures), in 1/model-unit.
    pub mean: Vec<f64>,
    /// Principal curvatures `(k1, k2)` with `k1 >= k2`.
    pub principal: Vec<(f64, f64)>,
    /// Vertices whose curvature was set to zero: boundary vertices, vertices
    /// with fewer than two neighbors, or without a usable normal.
    pub flagged: Vec<usize>,
}

/// Taubin's one-ring curvature tensor estimate.
///
/// For each vertex `v` with normal `N`, every ring neighbor `u` contributes a
/// directional curvature `k = 2 N.(v - u) / |u - v|^2` along the unit tangent
/// direction `T` of `v - u`. The tensor `M = sum w k T T^T` uses weights
/// proportional to the area of the faces sharing the edge `(v, u)`. Its two
/// tangent-plane eigenvalues `m1 >= m2` give the principal curvatures
/// `3 m1 - m2` and `3 m2 - m1`.
///
/// Normals point outward for counter-clockwise faces, so convex regions have
/// positive curvature (a unit sphere gives 1).
pub fn mean_curvature(mesh: &Mesh, adj: &Adjacency) -> CurvatureField {
    let per_vertex: Vec<Option<(f64, f64)>> =
        (0..mesh.vertex_count()).into_par_iter().map(|v| vertex_curvature(mesh, adj, v)).collect();
    let mut mean = Vec::with_capacity(per_vertex.len());
    let mut principal = Vec::with_capacity(per_vertex.len());
    let mut flagged = Vec::new();
    for (v, c) in per_vertex.into_iter().enumerate() {
        match c {
            Some((k1, k2)) => {
                mean.push(0.5 * (k1 + k2));
                principal.push((k1, k2));
            }
            None => {
                mean.push(0.0);
                principal.push((0.0, 0.0));
                flagged.push(v);
            }
        }
    }
    CurvatureField { mean, principal, flagged }
}

fn face_area(mesh: &Mesh, f: usize) -> f64 {
    let [a, b, c] = mesh.face_points(f);
    0.5 * (b - a).cross(&(c - a)).norm()
}

fn vertex_curvature(mesh: &Mesh, adj: &Adjacency, v: usize) -> Option<(f64, f64)> {
    let ring = adj.ring(v);
    let n = adj.normal(v);
    if ring.len() < 2 || adj.is_boundary(v) || n.norm() == 0.0 {
        return None;
    }
    let p = mesh.vertices()[v];
    let projector = Matrix3::identity() - n * n.transpose();

    let mut terms = Vec::with_capacity(ring.len());
    let mut total_weight = 0.0;
    for &u in ring {
        let d = p - mesh.vertices()[u];
        let len2 = d.norm_squared();
        let t = projector * d;
        let tn = t.norm();
        if len2 == 0.0 || tn == 0.0 {
            continue;
        }
        let w: f64 = adj.edge_faces(v, u).iter().map(|&f| face_area(mesh, f)).sum();
        let k = 2.0 * n.dot(&d) / len2;
        total_weight += w;
        terms.push((w, k, t / tn));
    }
    if terms.is_empty() || total_weight <= 0.0 {
        return None;
    }
    let mut m = Matrix3::zeros();
    for (w, k, t) in terms {
        m += (w / total_weight) * k * (t * t.transpose());
    }

    // Restrict to the tangent plane; N is an eigenvector of M with eigenvalue 0.
    let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = n.cross(&helper).normalize();
    let e2 = n.cross(&e1);
    let a = e1.dot(&(m * e1));
    let b = e1.dot(&(m * e2));
    let c = e2.dot(&(m * e2));
    let half_trace = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (m1, m2) = (half_trace + disc, half_trace - disc);
    Some((3.0 * m1 - m2, 3.0 * m2 - m1))
}
