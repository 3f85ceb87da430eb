use nalgebra::{Point3, Vector3};

use crate::mesh::Mesh;

/// Closest point to `p` on triangle `abc` (Voronoi-region walk).
pub fn closest_point_on_triangle(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> Point3<f64> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    if !denom.is_finite() {
        // Degenerate triangle: fall back to its edges.
        let candidates = [closest_on_segment(p, a, b), closest_on_segment(p, b, c), closest_on_segment(p, c, a)];
        return candidates
            .into_iter()
            .min_by(|x, y| (x - p).norm_squared().total_cmp(&(y - p).norm_squared()))
            .unwrap();
    }
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

fn closest_on_segment(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>) -> Point3<f64> {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    a + ab * ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Vector3<f64>,
    max: Vector3<f64>,
}

impl Aabb {
    fn empty() -> Self {
        Self { min: Vector3::repeat(f64::INFINITY), max: Vector3::repeat(f64::NEG_INFINITY) }
    }

    fn grow(&mut self, p: &Vector3<f64>) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    fn distance_squared(&self, p: &Point3<f64>) -> f64 {
        let mut d = 0.0;
        for i in 0..3 {
            let e = (self.min[i] - p[i]).max(0.0).max(p[i] - self.max[i]);
            d += e * e;
        }
        d
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { bounds: Aabb, start: usize, end: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

const LEAF_SIZE: usize = 4;

/// Bounding-volume hierarchy over a mesh's triangles for exact
/// point-to-surface distance queries.
#[derive(Debug, Clone)]
pub struct TriangleBvh {
    triangles: Vec<[Point3<f64>; 3]>,
    nodes: Vec<Node>,
}

impl TriangleBvh {
    pub fn build(mesh: &Mesh) -> Self {
        let mut triangles: Vec<[Point3<f64>; 3]> = (0..mesh.face_count()).map(|f| mesh.face_points(f)).collect();
        let mut nodes = Vec::with_capacity(2 * triangles.len() / LEAF_SIZE + 1);
        let n = triangles.len();
        build_node(&mut triangles, 0, n, &mut nodes);
        Self { triangles, nodes }
    }

    /// Exact distance from `p` to the nearest triangle.
    pub fn distance(&self, p: &Point3<f64>) -> f64 {
        self.distance_squared(p).sqrt()
    }

    pub fn distance_squared(&self, p: &Point3<f64>) -> f64 {
        let mut best = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i];
            if node.bounds().distance_squared(p) >= best {
                continue;
            }
            match *node {
                Node::Leaf { start, end, .. } => {
                    for [a, b, c] in &self.triangles[start..end] {
                        let q = closest_point_on_triangle(p, a, b, c);
                        best = best.min((q - p).norm_squared());
                    }
                }
                Node::Inner { left, right, .. } => {
                    let dl = self.nodes[left].bounds().distance_squared(p);
                    let dr = self.nodes[right].bounds().distance_squared(p);
                    // Push the farther child first so the nearer one is searched first.
                    if dl < dr {
                        stack.push(right);
                        stack.push(left);
                    } else {
                        stack.push(left);
                        stack.push(right);
                    }
                }
            }
        }
        best
    }
}

fn centroid(t: &[Point3<f64>; 3]) -> Vector3<f64> {
    (t[0].coords + t[1].coords + t[2].coords) / 3.0
}

fn build_node(tris: &mut [[Point3<f64>; 3]], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let mut bounds = Aabb::empty();
    let mut cbounds = Aabb::empty();
    for t in &tris[start..end] {
        for p in t {
            bounds.grow(&p.coords);
        }
        cbounds.grow(&centroid(t));
    }
    let index = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { bounds, start, end });
        return index;
    }
    let extent = cbounds.max - cbounds.min;
    let axis = extent.imax();
    let mid = start + (end - start) / 2;
    tris[start..end].select_nth_unstable_by(mid - start, |a, b| centroid(a)[axis].total_cmp(&centroid(b)[axis]));
    nodes.push(Node::Leaf { bounds, start, end });
    let left = build_node(tris, start, mid, nodes);
    let right = build_node(tris, mid, end, nodes);
    nodes[index] = Node::Inner { bounds, left, right };
    index
}
