//! Zeros of a tangent field: Newton location in charts and linear classification.

use serde::{Deserialize, Serialize};

use super::field::TangentField;
use super::sphere::{norm, sub, Chart, V3};
use crate::error::{Error, Result};

pub const TOL_EIG: f64 = 1e-7;
pub const DEDUP_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointType {
    Source,
    Sink,
    Saddle,
    SaddleSource,
    SaddleSink,
}

impl PointType {
    pub fn is_saddle_like(self) -> bool {
        matches!(self, PointType::Saddle | PointType::SaddleSource | PointType::SaddleSink)
    }

    pub fn is_saddle_node(self) -> bool {
        matches!(self, PointType::SaddleSource | PointType::SaddleSink)
    }

    pub fn index(self) -> i32 {
        match self {
            PointType::Source | PointType::Sink => 1,
            PointType::Saddle => -1,
            PointType::SaddleSource | PointType::SaddleSink => 0,
        }
    }
}

/// Separatrix of a saddle or saddle-node: a direction (unit vector tangent to the sphere)
/// and whether the orbit leaves the point (outgoing) or arrives at it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparatrixSeed {
    pub direction: V3,
    pub outgoing: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularPointRecord {
    pub id: usize,
    pub position: V3,
    pub chart: Chart,
    pub coords: [f64; 2],
    /// Eigenvalues as (re, im) pairs.
    pub eigenvalues: [[f64; 2]; 2],
    pub divergence: f64,
    pub sign: Sign,
    /// None when the classification is indeterminate at the tolerance.
    pub point_type: Option<PointType>,
    pub focus: bool,
    /// Poincare index from the classification, or from the winding number when unresolved.
    pub index: i32,
    /// Distance of the eigenvalue real parts from zero (smallest one).
    pub margin: f64,
    /// Quadratic coefficient along the center direction (saddle-nodes only).
    pub center_quadratic: Option<f64>,
    pub separatrices: Vec<SeparatrixSeed>,
    /// Classification error, if any (indeterminate at tolerance, not characteristic).
    pub status: Option<String>,
}

impl SingularPointRecord {
    pub fn resolved(&self) -> bool {
        self.point_type.is_some()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SingularOptions {
    /// Number of Fibonacci seeds for Newton's method.
    pub seeds: usize,
    pub tol_eig: f64,
}

impl Default for SingularOptions {
    fn default() -> Self {
        SingularOptions { seeds: 400, tol_eig: TOL_EIG }
    }
}

fn solve2(j: &[[f64; 2]; 2], r: &[f64; 2]) -> Option<[f64; 2]> {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let sc = j.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if det.abs() <= 1e-300 || det.abs() < 1e-14 * sc * sc {
        return None;
    }
    Some([(j[1][1] * r[0] - j[0][1] * r[1]) / det, (j[0][0] * r[1] - j[1][0] * r[0]) / det])
}

fn n2(v: &[f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

/// Damped Newton iteration in a chart, switching charts when leaving the preferred region.
fn newton(y: &TangentField, start: &V3, speed: f64) -> Option<V3> {
    let s = &y.sphere;
    let mut chart = s.preferred_chart(start);
    let mut u = s.to_chart(chart, start);
    let mut best: Option<(f64, [f64; 2], Chart)> = None;
    for _ in 0..80 {
        let f = y.chart_vector(chart, &u);
        let fn_ = n2(&f);
        if best.map_or(true, |b| fn_ < b.0) {
            best = Some((fn_, u, chart));
        }
        let j = y.chart_jacobian(chart, &u);
        let step = solve2(&j, &f)?;
        let len = n2(&step);
        let damp = if len > 0.5 { 0.5 / len } else { 1.0 };
        u = [u[0] - damp * step[0], u[1] - damp * step[1]];
        if n2(&u) > 1.2 {
            let p = s.from_chart(chart, &u);
            chart = chart.other();
            u = s.to_chart(chart, &p);
        }
        if len < 1e-15 * (1.0 + n2(&u)) {
            break;
        }
    }
    let (_, u, chart) = best?;
    let p = s.from_chart(chart, &u);
    let tol = 1e-9 * speed.max(1e-300);
    (norm(&y.eval(&p)) <= tol).then_some(p)
}

fn eig2(j: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let r = disc.sqrt();
        // larger real part first
        [[tr / 2.0 + r, 0.0], [tr / 2.0 - r, 0.0]]
    } else {
        let r = (-disc).sqrt();
        [[tr / 2.0, r], [tr / 2.0, -r]]
    }
}

/// Eigenvector of a real 2x2 matrix for a real eigenvalue.
fn eigvec(j: &[[f64; 2]; 2], l: f64) -> [f64; 2] {
    let a = [j[0][0] - l, j[0][1]];
    let b = [j[1][0], j[1][1] - l];
    // null vector of [a; b]: perpendicular to the larger row
    let r = if n2(&a) >= n2(&b) { a } else { b };
    if n2(&r) < 1e-300 {
        return [1.0, 0.0];
    }
    let v = [-r[1], r[0]];
    let n = n2(&v);
    [v[0] / n, v[1] / n]
}

/// Winding number of the chart field around a small circle.
pub fn winding_index(y: &TangentField, chart: Chart, u: &[f64; 2], radius: f64) -> i32 {
    let m = 64;
    let mut total = 0.0;
    let ang = |k: usize| {
        let t = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
        let v = y.chart_vector(chart, &[u[0] + radius * t.cos(), u[1] + radius * t.sin()]);
        v[1].atan2(v[0])
    };
    let mut prev = ang(0);
    for k in 1..=m {
        let a = ang(k % m);
        let mut d = a - prev;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
        prev = a;
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i32
}

/// Linear classification of a zero p. `neighbour_dist` bounds the circle used for the
/// winding-number index.
pub fn classify_singular(y: &TangentField, p: &V3, tol_eig: f64, neighbour_dist: f64) -> Result<SingularPointRecord> {
    let s = &y.sphere;
    let chart = s.preferred_chart(p);
    let u = s.to_chart(chart, p);
    let speed = y.typical_speed(64).max(1e-300);
    let chart_scale = s.area_density(&u).sqrt();
    if norm(&y.eval(p)) >= 1e-8 * speed {
        return Err(Error::Precondition(format!("field does not vanish at {p:?}")));
    }
    let j = y.chart_jacobian(chart, &u);
    let ev = eig2(&j);
    let tr = j[0][0] + j[1][1];
    let div = tr;
    let re = [ev[0][0], ev[1][0]];
    let margin = re[0].abs().min(re[1].abs());
    let focus = ev[0][1] != 0.0;
    let wind_r = (1e-3 / chart_scale).min(0.3 * neighbour_dist / chart_scale);
    let winding = winding_index(y, chart, &u, wind_r);
    let mut rec = SingularPointRecord {
        id: 0,
        position: *p,
        chart,
        coords: u,
        eigenvalues: ev,
        divergence: div,
        sign: Sign::of(div),
        point_type: None,
        focus,
        index: winding,
        margin,
        center_quadratic: None,
        separatrices: Vec::new(),
        status: None,
    };
    let to_emb = |v: [f64; 2]| {
        let w = s.vector_from_chart(chart, &u, &v);
        let n = norm(&w);
        [w[0] / n, w[1] / n, w[2] / n]
    };
    if y.is_characteristic() && div.abs() < tol_eig {
        rec.status = Some(format!("not a characteristic foliation: divergence {div:.3e} at a zero"));
        return Ok(rec);
    }
    let small = [re[0].abs() < tol_eig, re[1].abs() < tol_eig];
    if small[0] && small[1] {
        rec.status = Some(format!(
            "indeterminate at tolerance: eigenvalue real parts {:.3e}, {:.3e} below {tol_eig:.1e}",
            re[0], re[1]
        ));
        return Ok(rec);
    }
    if small[0] || small[1] {
        // saddle-node: center direction from the small eigenvalue
        let (lc, lh) = if small[0] { (re[0], re[1]) } else { (re[1], re[0]) };
        let vc = eigvec(&j, lc);
        let vh = eigvec(&j, lh);
        let jt = [[j[0][0], j[1][0]], [j[0][1], j[1][1]]];
        let w = eigvec(&jt, lc);
        let d2 = y.chart_second_derivative(chart, &u, &vc);
        let wv = w[0] * vc[0] + w[1] * vc[1];
        let c = (w[0] * d2[0] + w[1] * d2[1]) / (2.0 * wv);
        if !c.is_finite() || c.abs() < tol_eig {
            rec.status = Some("indeterminate at tolerance: degenerate center direction".into());
            return Ok(rec);
        }
        rec.center_quadratic = Some(c);
        let ec = to_emb(vc);
        let eh = to_emb(vh);
        let neg = |v: V3| [-v[0], -v[1], -v[2]];
        // center orbit x' = c x^2 arrives from side -sign(c) and leaves on side sign(c)
        let (pt, center_dir, center_out) = if lh > 0.0 {
            (PointType::SaddleSource, if c > 0.0 { neg(ec) } else { ec }, false)
        } else {
            (PointType::SaddleSink, if c > 0.0 { ec } else { neg(ec) }, true)
        };
        rec.point_type = Some(pt);
        rec.index = pt.index();
        rec.sign = Sign::of(lh);
        rec.separatrices = vec![
            SeparatrixSeed { direction: eh, outgoing: lh > 0.0 },
            SeparatrixSeed { direction: neg(eh), outgoing: lh > 0.0 },
            SeparatrixSeed { direction: center_dir, outgoing: center_out },
        ];
        return Ok(rec);
    }
    if re[0] * re[1] > 0.0 {
        let pt = if re[0] > 0.0 { PointType::Source } else { PointType::Sink };
        rec.point_type = Some(pt);
        rec.index = 1;
    } else {
        rec.point_type = Some(PointType::Saddle);
        rec.index = -1;
        let vu = to_emb(eigvec(&j, re[0]));
        let vs = to_emb(eigvec(&j, re[1]));
        let neg = |v: V3| [-v[0], -v[1], -v[2]];
        rec.separatrices = vec![
            SeparatrixSeed { direction: vu, outgoing: true },
            SeparatrixSeed { direction: neg(vu), outgoing: true },
            SeparatrixSeed { direction: vs, outgoing: false },
            SeparatrixSeed { direction: neg(vs), outgoing: false },
        ];
    }
    Ok(rec)
}

/// Locates and classifies the zeros of Y by Newton refinement from a Fibonacci seed grid.
pub fn find_singular_points(y: &TangentField, opts: &SingularOptions) -> Result<Vec<SingularPointRecord>> {
    let s = &y.sphere;
    let speed = y.typical_speed(256);
    if speed == 0.0 {
        return Err(Error::Degenerate("field vanishes identically".into()));
    }
    let seeds = s.fibonacci_points(opts.seeds.max(16));
    let cell = s.radius * (4.0 * std::f64::consts::PI / seeds.len() as f64).sqrt();
    let mut found: Vec<V3> = Vec::new();
    let mut failed: Vec<V3> = Vec::new();
    for seed in &seeds {
        match newton(y, seed, speed) {
            Some(p) => {
                if !found.iter().any(|q| norm(&sub(q, &p)) < DEDUP_RADIUS * s.radius) {
                    found.push(p);
                }
            }
            None => {
                if norm(&y.eval(seed)) < 1e-3 * speed {
                    failed.push(*seed);
                }
            }
        }
    }
    for f in &failed {
        if !found.iter().any(|q| norm(&sub(q, f)) < cell) {
            return Err(Error::Singular(format!(
                "Newton diverged near the seed cell at {f:?} (radius {cell:.3e}) where |Y| is small"
            )));
        }
    }
    // deterministic order: by z, then x, then y
    found.sort_by(|a, b| b[2].total_cmp(&a[2]).then(a[0].total_cmp(&b[0])).then(a[1].total_cmp(&b[1])));
    let mut out = Vec::with_capacity(found.len());
    for (i, p) in found.iter().enumerate() {
        // isolation check: a zero that persists along the null direction
        let chart = s.preferred_chart(p);
        let u = s.to_chart(chart, p);
        let j = y.chart_jacobian(chart, &u);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let jn = j.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if det.abs() < 1e-10 * jn.max(1e-300).powi(2) || jn < 1e-10 * speed {
            let dir = if jn < 1e-12 * speed { [1.0, 0.0] } else { eigvec(&j, 0.0) };
            let h = 1e-3;
            let persists = [-1.0, 1.0].iter().all(|sg| {
                let w = [u[0] + sg * h * dir[0], u[1] + sg * h * dir[1]];
                norm(&y.eval(&s.from_chart(chart, &w))) < 1e-9 * speed
            });
            if persists {
                return Err(Error::Degenerate(format!("non-isolated zero set suspected near {p:?}")));
            }
        }
        let nd = found
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, q)| norm(&sub(q, p)))
            .fold(s.radius, f64::min);
        let mut rec = classify_singular(y, p, opts.tol_eig, nd)?;
        rec.id = i;
        out.push(rec);
    }
    Ok(out)
}

pub fn index_sum(points: &[SingularPointRecord]) -> i32 {
    points.iter().map(|r| r.index).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::OneForm;
    use crate::foliation::field::characteristic_field;
    use crate::foliation::sphere::SphereSurface;
    use crate::poly::Poly;

    #[test]
    fn round_sphere_standard_form() {
        let y = characteristic_field(&OneForm::standard(1), SphereSurface::default()).unwrap();
        let pts = find_singular_points(&y, &SingularOptions::default()).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(norm(&sub(&pts[0].position, &[0.0, 0.0, 1.0])) < 1e-6);
        assert!(norm(&sub(&pts[1].position, &[0.0, 0.0, -1.0])) < 1e-6);
        assert_eq!(pts[0].sign, Sign::Positive);
        assert_eq!(pts[1].sign, Sign::Negative);
        assert_eq!(pts[0].point_type, Some(PointType::Source));
        assert!(pts[0].focus);
        assert_eq!(index_sum(&pts), 2);
    }

    #[test]
    fn height_gradient_and_rotation() {
        let s = SphereSurface::default();
        let y = TangentField::gradient("h", s, Poly::var(3, 2), false).unwrap();
        let pts = find_singular_points(&y, &SingularOptions::default()).unwrap();
        let types: Vec<_> = pts.iter().map(|p| p.point_type).collect();
        assert_eq!(types, vec![Some(PointType::Sink), Some(PointType::Source)]);
        let rot = TangentField::synthetic("rot", s, |q| [-q[1], q[0], 0.0]);
        let pts = find_singular_points(&rot, &SingularOptions::default()).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|p| p.point_type.is_none() && p.status.as_deref().unwrap().contains("indeterminate")));
        assert_eq!(index_sum(&pts), 2);
    }

    #[test]
    fn dz_is_flagged() {
        let f = OneForm::custom_poly("dz", vec![Poly::zero(3), Poly::zero(3), Poly::constant(3, 1.0)]).unwrap();
        let y = characteristic_field(&f, SphereSurface::default()).unwrap();
        let pts = find_singular_points(&y, &SingularOptions::default()).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|p| p.status.as_deref().unwrap().starts_with("not a characteristic")));
    }
}
