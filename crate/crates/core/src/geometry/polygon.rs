use alloc::vec::Vec;

use crate::math::{hypot, relative};
use crate::{Error, Result};

/// Relative tolerance on the centroid of a polygon.
pub const CENTROID_TOLERANCE: f64 = 1e-9;

/// Simple polygon with counter-clockwise vertices and centroid at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
}

/// Exact area moments from Green's theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonMoments {
    pub area: f64,
    /// `(int x, int y)`.
    pub first: [f64; 2],
    /// `(int x^2, int xy, int y^2)`.
    pub second: [f64; 3],
}

impl Polygon {
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateShape("polygon needs at least three vertices"));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateShape("polygon vertex is not finite"));
        }
        let p = Polygon { vertices };
        let m = p.moments();
        let radius = p.radius();
        if !(m.area > 0.0) || m.area <= 1e-14 * radius * radius {
            return Err(Error::DegenerateShape(
                "polygon must have positive area with counter-clockwise vertices",
            ));
        }
        let s = hypot(m.first[0], m.first[1]);
        if relative(s, m.area * radius) > CENTROID_TOLERANCE {
            return Err(Error::OffCentre { static_moment: s });
        }
        Ok(p)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Largest vertex distance from the origin.
    pub fn radius(&self) -> f64 {
        self.vertices.iter().map(|v| hypot(v[0], v[1])).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|v| [c * v[0], c * v[1]]).collect(),
        }
    }

    pub fn moments(&self) -> PolygonMoments {
        let mut area = 0.0;
        let (mut sx, mut sy) = (0.0, 0.0);
        let (mut ixx, mut ixy, mut iyy) = (0.0, 0.0, 0.0);
        let n = self.vertices.len();
        for k in 0..n {
            let [x0, y0] = self.vertices[k];
            let [x1, y1] = self.vertices[(k + 1) % n];
            let cross = x0 * y1 - x1 * y0;
            area += cross;
            sx += (x0 + x1) * cross;
            sy += (y0 + y1) * cross;
            ixx += (x0 * x0 + x0 * x1 + x1 * x1) * cross;
            iyy += (y0 * y0 + y0 * y1 + y1 * y1) * cross;
            ixy += (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) * cross;
        }
        PolygonMoments {
            area: area / 2.0,
            first: [sx / 6.0, sy / 6.0],
            second: [ixx / 12.0, ixy / 24.0, iyy / 12.0],
        }
    }

    /// Even-odd ray casting.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let [xi, yi] = self.vertices[i];
            let [xj, yj] = self.vertices[j];
            if (yi > p[1]) != (yj > p[1]) && p[0] < (xj - xi) * (p[1] - yi) / (yj - yi) + xi {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for a in 0..2 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rectangle(h1: f64, h2: f64) -> Vec<[f64; 2]> {
        let (a, b) = (h1 / 2.0, h2 / 2.0);
        vec![[-a, -b], [a, -b], [a, b], [-a, b]]
    }

    #[test]
    fn rectangle_moments() {
        let p = Polygon::new(rectangle(2.0, 1.0)).unwrap();
        let m = p.moments();
        assert!((m.area - 2.0).abs() < 1e-15);
        assert!((m.second[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.second[2] - 1.0 / 6.0).abs() < 1e-15);
        assert!(m.second[1].abs() < 1e-15);
    }

    #[test]
    fn off_centre_polygon_is_rejected() {
        let shifted: Vec<[f64; 2]> = rectangle(2.0, 1.0).into_iter().map(|[x, y]| [x + 0.1, y]).collect();
        assert!(matches!(Polygon::new(shifted), Err(Error::OffCentre { .. })));
    }

    #[test]
    fn clockwise_polygon_is_rejected() {
        let mut v = rectangle(1.0, 1.0);
        v.reverse();
        assert!(matches!(Polygon::new(v), Err(Error::DegenerateShape(_))));
    }

    #[test]
    fn triangle_product_moment() {
        // Centred right triangle with legs on the axes, shifted by its centroid.
        let c = [1.0 / 3.0, 1.0 / 3.0];
        let v = vec![[0.0 - c[0], 0.0 - c[1]], [1.0 - c[0], 0.0 - c[1]], [0.0 - c[0], 1.0 - c[1]]];
        let p = Polygon::new(v).unwrap();
        let m = p.moments();
        // About its centroid: Ixx = Iyy = 1/36, Ixy = -1/72 for the unit right triangle.
        assert!((m.second[0] - 1.0 / 36.0).abs() < 1e-15);
        assert!((m.second[1] + 1.0 / 72.0).abs() < 1e-15);
        assert!(p.contains([0.0, 0.0]));
        assert!(!p.contains([0.6, 0.6]));
    }
}
