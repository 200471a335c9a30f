//! Round 2-spheres in R^3 with two stereographic charts and the induced area form.
//!
//! With q = (p - center)/radius:
//!   south chart (centered at the south pole): u = (q_x, -q_y) / (1 - q_z), valid for q_z < 0.9
//!   north chart (centered at the north pole): v = (q_x,  q_y) / (1 + q_z), valid for q_z > -0.9
//! Both are orientation preserving for the outward normal; on the overlap v = (u_1, -u_2)/|u|^2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type V3 = [f64; 3];

pub fn add(a: &V3, b: &V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
pub fn sub(a: &V3, b: &V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
pub fn scale(a: &V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}
pub fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
pub fn cross(a: &V3, b: &V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
pub fn norm(a: &V3) -> f64 {
    dot(a, a).sqrt()
}
pub fn normalize(a: &V3) -> V3 {
    scale(a, 1.0 / norm(a))
}

/// Overlap band: both charts are used only where |q_z| < BAND.
pub const BAND: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    North,
    South,
}

impl Chart {
    pub fn other(self) -> Chart {
        match self {
            Chart::North => Chart::South,
            Chart::South => Chart::North,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereSurface {
    pub center: V3,
    pub radius: f64,
}

impl Default for SphereSurface {
    fn default() -> Self {
        SphereSurface { center: [0.0; 3], radius: 1.0 }
    }
}

impl SphereSurface {
    pub fn new(center: V3, radius: f64) -> Result<SphereSurface> {
        if !(radius > 0.0) || !radius.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("sphere needs a finite center and positive radius".into()));
        }
        Ok(SphereSurface { center, radius })
    }

    /// Normalized position q = (p - c)/R.
    pub fn q(&self, p: &V3) -> V3 {
        scale(&sub(p, &self.center), 1.0 / self.radius)
    }

    pub fn from_q(&self, q: &V3) -> V3 {
        add(&self.center, &scale(q, self.radius))
    }

    /// Outward unit normal (at the radial projection of p).
    pub fn normal(&self, p: &V3) -> V3 {
        normalize(&sub(p, &self.center))
    }

    /// Radial projection onto the sphere.
    pub fn project(&self, p: &V3) -> V3 {
        self.from_q(&self.normal(p))
    }

    /// Component of v tangent to the sphere at p.
    pub fn tangent_part(&self, p: &V3, v: &V3) -> V3 {
        let n = self.normal(p);
        sub(v, &scale(&n, dot(v, &n)))
    }

    /// Chart with p farthest from its singular pole.
    pub fn preferred_chart(&self, p: &V3) -> Chart {
        if self.q(p)[2] <= 0.0 {
            Chart::South
        } else {
            Chart::North
        }
    }

    pub fn in_chart_domain(&self, chart: Chart, p: &V3) -> bool {
        let z = self.q(p)[2];
        match chart {
            Chart::South => z < BAND,
            Chart::North => z > -BAND,
        }
    }

    pub fn to_chart(&self, chart: Chart, p: &V3) -> [f64; 2] {
        let q = self.normal(p);
        match chart {
            Chart::South => [q[0] / (1.0 - q[2]), -q[1] / (1.0 - q[2])],
            Chart::North => [q[0] / (1.0 + q[2]), q[1] / (1.0 + q[2])],
        }
    }

    pub fn from_chart(&self, chart: Chart, u: &[f64; 2]) -> V3 {
        let r2 = u[0] * u[0] + u[1] * u[1];
        let d = 1.0 + r2;
        let q = match chart {
            Chart::South => [2.0 * u[0] / d, -2.0 * u[1] / d, (r2 - 1.0) / d],
            Chart::North => [2.0 * u[0] / d, 2.0 * u[1] / d, (1.0 - r2) / d],
        };
        self.from_q(&q)
    }

    /// Columns dp/du_1, dp/du_2 of the chart parametrization.
    pub fn chart_frame(&self, chart: Chart, u: &[f64; 2]) -> [V3; 2] {
        let (a, b) = (u[0], u[1]);
        let r2 = a * a + b * b;
        let d2 = (1.0 + r2) * (1.0 + r2);
        let k = 2.0 * self.radius / d2;
        // derivatives of (2a, 2b, 1 - r2)/(1 + r2) and its south variant
        let dn_a = [k * (1.0 - a * a + b * b), k * (-2.0 * a * b), k * (-2.0 * a)];
        let dn_b = [k * (-2.0 * a * b), k * (1.0 + a * a - b * b), k * (-2.0 * b)];
        match chart {
            Chart::North => [dn_a, dn_b],
            Chart::South => [[dn_a[0], -dn_a[1], -dn_a[2]], [dn_b[0], -dn_b[1], -dn_b[2]]],
        }
    }

    /// Conformal factor: |dp/du_i|^2 (both columns), i.e. the area density of the chart.
    pub fn area_density(&self, u: &[f64; 2]) -> f64 {
        let r2 = u[0] * u[0] + u[1] * u[1];
        let l = 2.0 * self.radius / (1.0 + r2);
        l * l
    }

    /// Pushes a tangent vector at p into chart coordinates.
    pub fn vector_to_chart(&self, chart: Chart, u: &[f64; 2], v: &V3) -> [f64; 2] {
        let f = self.chart_frame(chart, u);
        let l2 = self.area_density(u);
        [dot(&f[0], v) / l2, dot(&f[1], v) / l2]
    }

    pub fn vector_from_chart(&self, chart: Chart, u: &[f64; 2], w: &[f64; 2]) -> V3 {
        let f = self.chart_frame(chart, u);
        add(&scale(&f[0], w[0]), &scale(&f[1], w[1]))
    }

    /// Chart transition u -> v between the two charts (the same formula in both directions).
    pub fn transition(u: &[f64; 2]) -> [f64; 2] {
        let r2 = u[0] * u[0] + u[1] * u[1];
        [u[0] / r2, -u[1] / r2]
    }

    pub fn transition_jacobian(u: &[f64; 2]) -> [[f64; 2]; 2] {
        let (a, b) = (u[0], u[1]);
        let r2 = a * a + b * b;
        let r4 = r2 * r2;
        [[(b * b - a * a) / r4, -2.0 * a * b / r4], [2.0 * a * b / r4, (b * b - a * a) / r4]]
    }

    /// Geodesic distance between two points on the sphere.
    pub fn geodesic(&self, p: &V3, q: &V3) -> f64 {
        let a = self.normal(p);
        let b = self.normal(q);
        self.radius * norm(&cross(&a, &b)).atan2(dot(&a, &b))
    }

    /// Orthonormal tangent basis (e1, e2) at p with e1 x e2 = outward normal.
    pub fn tangent_basis(&self, p: &V3) -> (V3, V3) {
        let n = self.normal(p);
        let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let e1 = normalize(&sub(&seed, &scale(&n, dot(&seed, &n))));
        let e2 = cross(&n, &e1);
        (e1, e2)
    }

    /// Deterministic quasi-uniform points (Fibonacci lattice).
    pub fn fibonacci_points(&self, n: usize) -> Vec<V3> {
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        (0..n)
            .map(|i| {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                let r = (1.0 - z * z).sqrt();
                let th = golden * i as f64;
                self.from_q(&[r * th.cos(), r * th.sin(), z])
            })
            .collect()
    }
}

/// Triangle mesh of the unit sphere by repeated subdivision of the icosahedron.
pub struct Mesh {
    pub vertices: Vec<V3>,
    pub triangles: Vec<[usize; 3]>,
}

pub fn icosphere(level: usize) -> Mesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<V3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(normalize)
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache = std::collections::HashMap::new();
        let mut mid = |a: usize, b: usize, vs: &mut Vec<V3>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                vs.push(normalize(&scale(&add(&vs[a], &vs[b]), 0.5)));
                vs.len() - 1
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for tri in &triangles {
            let ab = mid(tri[0], tri[1], &mut vertices);
            let bc = mid(tri[1], tri[2], &mut vertices);
            let ca = mid(tri[2], tri[0], &mut vertices);
            next.push([tri[0], ab, ca]);
            next.push([tri[1], bc, ab]);
            next.push([tri[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }
    Mesh { vertices, triangles }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charts_roundtrip_and_orientation() {
        let s = SphereSurface::new([0.5, -1.0, 2.0], 2.0).unwrap();
        for p in s.fibonacci_points(50) {
            for c in [Chart::North, Chart::South] {
                if !s.in_chart_domain(c, &p) {
                    continue;
                }
                let u = s.to_chart(c, &p);
                let back = s.from_chart(c, &u);
                assert!(norm(&sub(&back, &p)) < 1e-12);
                let f = s.chart_frame(c, &u);
                let h = 1e-6;
                let fd = scale(&sub(&s.from_chart(c, &[u[0] + h, u[1]]), &s.from_chart(c, &[u[0] - h, u[1]])), 0.5 / h);
                assert!(norm(&sub(&fd, &f[0])) < 1e-6);
                let fd = scale(&sub(&s.from_chart(c, &[u[0], u[1] + h]), &s.from_chart(c, &[u[0], u[1] - h])), 0.5 / h);
                assert!(norm(&sub(&fd, &f[1])) < 1e-6);
                let orient = dot(&cross(&f[0], &f[1]), &s.normal(&p));
                assert!(orient > 0.0);
                assert!((orient - s.area_density(&u)).abs() < 1e-9 * orient);
            }
        }
    }

    #[test]
    fn transition_matches_charts() {
        let s = SphereSurface::default();
        for p in s.fibonacci_points(40) {
            if s.q(&p)[2].abs() >= BAND {
                continue;
            }
            let u = s.to_chart(Chart::South, &p);
            let v = s.to_chart(Chart::North, &p);
            let t = SphereSurface::transition(&u);
            assert!((t[0] - v[0]).abs() < 1e-12 && (t[1] - v[1]).abs() < 1e-12);
            let j = SphereSurface::transition_jacobian(&u);
            assert!(j[0][0] * j[1][1] - j[0][1] * j[1][0] > 0.0);
        }
    }

    #[test]
    fn icosphere_counts() {
        let m = icosphere(2);
        assert_eq!(m.vertices.len(), 162);
        assert_eq!(m.triangles.len(), 320);
    }
}
