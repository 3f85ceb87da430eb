use std::collections::HashMap;

use nalgebra::Point3;

/// Uniform spatial hash over a point set for exact fixed-radius queries.
pub(crate) struct PointGrid<'a> {
    points: &'a [Point3<f64>],
    cell: f64,
    cells: HashMap<[i64; 3], Vec<usize>>,
}

impl<'a> PointGrid<'a> {
    pub fn new(points: &'a [Point3<f64>], cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite());
        let mut cells: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, cell)).or_default().push(i);
        }
        Self { points, cell, cells }
    }

    fn key(p: &Point3<f64>, cell: f64) -> [i64; 3] {
        [(p.x / cell).floor() as i64, (p.y / cell).floor() as i64, (p.z / cell).floor() as i64]
    }

    /// Points strictly closer than `radius` to `center`, as
    /// `(index, squared distance)` sorted by index.
    pub fn within(&self, center: &Point3<f64>, radius: f64, out: &mut Vec<(usize, f64)>) {
        out.clear();
        let r2 = radius * radius;
        let lo = Self::key(&(center - nalgebra::Vector3::repeat(radius)), self.cell);
        let hi = Self::key(&(center + nalgebra::Vector3::repeat(radius)), self.cell);
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    if let Some(ids) = self.cells.get(&[x, y, z]) {
                        for &i in ids {
                            let d2 = (self.points[i] - center).norm_squared();
                            if d2 < r2 {
                                out.push((i, d2));
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable_by_key(|&(i, _)| i);
    }
}
