//! Orbit tracing on the embedded sphere.
//!
//! Orbits are integrated in R^3 with the field evaluated at the radial projection, which keeps
//! the distance to the center constant; the state is re-projected after accepted steps.

use serde::{Deserialize, Serialize};

use super::field::TangentField;
use super::singular::{PointType, SingularPointRecord};
use super::sphere::{cross, dot, norm, normalize, scale, sub, V3};
use crate::ode::{self, OdeOptions, Stepper};

/// Radius (relative to the sphere radius) of the basin used to declare convergence to a zero.
pub const BASIN_RADIUS: f64 = 1e-4;
/// Closing tolerance (relative to the sphere radius) on a transversal.
pub const CLOSE_TOL: f64 = 1e-6;
/// Saddle neighbourhood (relative) for polycycle bookkeeping.
pub const SADDLE_NBHD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TraceBudget {
    pub max_time: f64,
    pub max_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Limit {
    Singular { id: usize },
    Cycle { point: V3, period: f64 },
    Polycycle { saddles: Vec<usize> },
    BudgetExhausted,
}

#[derive(Debug, Clone)]
pub struct Orbit {
    pub polyline: Vec<V3>,
    pub limit: Limit,
    pub time: f64,
    /// Last transversal crossing when successive return gaps were still shrinking at the end
    /// of the budget.
    pub cycle_candidate: Option<V3>,
}

pub fn ode_options(radius: f64) -> OdeOptions {
    OdeOptions { atol: 1e-12 * radius, rtol: 1e-10, h_init: 1e-4, h_max: 0.25, ..OdeOptions::default() }
}

/// Great-circle transversal through q orthogonal to the flow direction `nrm` at q.
#[derive(Debug, Clone, Copy)]
pub struct Section {
    pub center: V3,
    pub radius: f64,
    pub q: V3,
    pub nrm: V3,
    pub e0: V3,
    pub w: V3,
}

impl Section {
    pub fn new(y: &TangentField, q: &V3, dir: f64) -> Option<Section> {
        let s = &y.sphere;
        let v = y.eval(q);
        if norm(&v) == 0.0 {
            return None;
        }
        let nrm = scale(&normalize(&v), dir);
        let e0 = s.normal(q);
        let w = cross(&nrm, &e0);
        Some(Section { center: s.center, radius: s.radius, q: *q, nrm, e0, w })
    }

    pub fn height(&self, p: &V3) -> f64 {
        dot(&sub(p, &self.center), &self.nrm)
    }

    pub fn near_half(&self, p: &V3) -> bool {
        dot(&sub(p, &self.center), &self.e0) > 0.0
    }

    pub fn coord(&self, p: &V3) -> f64 {
        let d = sub(p, &self.center);
        self.radius * dot(&d, &self.w).atan2(dot(&d, &self.e0))
    }

    pub fn point(&self, s: f64) -> V3 {
        let a = s / self.radius;
        let d = [
            self.e0[0] * a.cos() + self.w[0] * a.sin(),
            self.e0[1] * a.cos() + self.w[1] * a.sin(),
            self.e0[2] * a.cos() + self.w[2] * a.sin(),
        ];
        [self.center[0] + self.radius * d[0], self.center[1] + self.radius * d[1], self.center[2] + self.radius * d[2]]
    }

    /// Unit tangent of the transversal at coordinate s.
    pub fn tangent(&self, s: f64) -> V3 {
        let a = s / self.radius;
        [
            -self.e0[0] * a.sin() + self.w[0] * a.cos(),
            -self.e0[1] * a.sin() + self.w[1] * a.cos(),
            -self.e0[2] * a.sin() + self.w[2] * a.cos(),
        ]
    }
}

/// Refines a transversal crossing inside the step from `y_prev` (time offset 0) to the
/// accepted state; returns (point, time offset).
pub fn refine_crossing(
    y: &TangentField,
    sec: &Section,
    y_prev: &[f64],
    dt: f64,
    h_prev: f64,
    h_new: f64,
    dir: f64,
    opts: &OdeOptions,
) -> (Vec<f64>, f64) {
    let n = y_prev.len();
    let f = |z: &[f64], dz: &mut [f64]| {
        let p = [z[0], z[1], z[2]];
        let v = y.eval(&p);
        dz[..3].copy_from_slice(&v);
        if n > 3 {
            dz[3] = y.divergence(&p);
        }
    };
    let mut delta = dt * (-h_prev) / (h_new - h_prev);
    let mut z = y_prev.to_vec();
    for _ in 0..4 {
        z = match ode::integrate(f, y_prev, dir * delta, opts) {
            Ok(z) => z,
            Err(_) => break,
        };
        let p = [z[0], z[1], z[2]];
        let hz = sec.height(&p);
        let rate = dir * dot(&y.eval(&p), &sec.nrm);
        if rate.abs() < 1e-300 {
            break;
        }
        let step = hz / rate;
        delta = (delta - step).clamp(0.0, dt);
        if step.abs() < 1e-15 * dt.max(1e-300) {
            break;
        }
    }
    (z, delta)
}

struct Visit {
    inside: bool,
    mins: Vec<f64>,
}

/// Traces the orbit of x0. `ignore` disables the basin of one zero until the orbit has moved
/// farther than the given distance from it (used for separatrices).
pub fn trace_orbit(
    y: &TangentField,
    x0: &V3,
    dir: Direction,
    budget: &TraceBudget,
    points: &[SingularPointRecord],
    ignore: Option<(usize, f64)>,
) -> Orbit {
    let s = y.sphere;
    let r = s.radius;
    let sg = dir.sign();
    let opts = ode_options(r);
    let speed = y.typical_speed(64).max(1e-300);
    let tau0 = r / speed;
    let mut f = |z: &[f64], dz: &mut [f64]| {
        let v = y.eval(&[z[0], z[1], z[2]]);
        dz.copy_from_slice(&v);
    };
    let mut st = Stepper::new(3, sg, opts);
    let p0 = s.project(x0);
    let mut z = p0.to_vec();
    let mut poly = vec![p0];
    let mut sample_dist = 0.02 * r;
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut released = ignore.is_none();
    let mut next_anchor = 2.0 * tau0;
    let mut section: Option<Section> = None;
    let mut crossings: Vec<(V3, f64)> = Vec::new();
    let mut prev_h = 0.0;
    let mut visits: Vec<Visit> = points.iter().map(|_| Visit { inside: false, mins: Vec::new() }).collect();
    let finish = |poly: Vec<V3>, limit: Limit, t: f64, cand: Option<V3>| Orbit { polyline: poly, limit, time: t, cycle_candidate: cand };
    loop {
        if t >= budget.max_time || steps >= budget.max_steps {
            break;
        }
        let z_prev = z.clone();
        let dt = match st.step(&mut f, &mut z, budget.max_time - t) {
            Ok(dt) => dt.abs(),
            Err(_) => break,
        };
        steps += 1;
        let mut p = [z[0], z[1], z[2]];
        if (norm(&sub(&p, &s.center)) - r).abs() > 1e-11 * r {
            p = s.project(&p);
            z.copy_from_slice(&p);
            st.invalidate();
        }
        t += dt;
        if !released {
            let (id, rel) = ignore.expect("ignore set");
            if norm(&sub(&p, &points[id].position)) > rel {
                released = true;
            }
        }
        for (k, pt) in points.iter().enumerate() {
            let d = norm(&sub(&p, &pt.position));
            if d < BASIN_RADIUS * r && (released || ignore.map_or(true, |(id, _)| id != k)) {
                poly.push(p);
                poly.push(pt.position);
                return finish(poly, Limit::Singular { id: pt.id }, t, None);
            }
            if pt.point_type.map_or(false, PointType::is_saddle_like) {
                let v = &mut visits[k];
                if d < SADDLE_NBHD * r {
                    if !v.inside {
                        v.inside = true;
                        v.mins.push(d);
                    } else if let Some(m) = v.mins.last_mut() {
                        *m = m.min(d);
                    }
                } else {
                    v.inside = false;
                }
            }
        }
        if norm(&sub(&p, poly.last().expect("nonempty"))) > sample_dist {
            poly.push(p);
            if poly.len() > 20_000 {
                poly = poly.iter().step_by(2).copied().collect();
                sample_dist *= 2.0;
            }
        }
        if t >= next_anchor {
            section = Section::new(y, &p, sg);
            crossings.clear();
            prev_h = 0.0;
            next_anchor *= 4.0;
            continue;
        }
        if let Some(sec) = &section {
            let h = sec.height(&p);
            if prev_h < 0.0 && h >= 0.0 && sec.near_half(&p) {
                let (zc, delta) = refine_crossing(y, sec, &z_prev, dt, prev_h, h, sg, &opts);
                let pc = s.project(&[zc[0], zc[1], zc[2]]);
                let tc = t - dt + delta;
                if let Some((last, tl)) = crossings.last() {
                    if norm(&sub(&pc, last)) < CLOSE_TOL * r {
                        poly.push(p);
                        return finish(poly, Limit::Cycle { point: pc, period: tc - tl }, t, None);
                    }
                }
                crossings.push((pc, tc));
            }
            prev_h = h;
        }
    }
    // budget exhausted: polycycle or shrinking-gap candidate
    let saddles: Vec<usize> = points
        .iter()
        .zip(&visits)
        .filter(|(_, v)| v.mins.len() >= 3 && v.mins.windows(2).rev().take(2).all(|w| w[1] < w[0]))
        .map(|(pt, _)| pt.id)
        .collect();
    let cand = if crossings.len() >= 4 {
        let gaps: Vec<f64> = crossings.windows(2).map(|w| norm(&sub(&w[1].0, &w[0].0))).collect();
        let k = gaps.len();
        (gaps[k - 1] < gaps[k - 2] && gaps[k - 2] < gaps[k - 3] && gaps[k - 1] < 0.05 * r)
            .then(|| crossings[crossings.len() - 1].0)
    } else {
        None
    };
    let limit = if saddles.is_empty() { Limit::BudgetExhausted } else { Limit::Polycycle { saddles } };
    finish(poly, limit, t, cand)
}

/// Default budget: a multiple of the time needed to cross the sphere at typical speed.
pub fn default_budget(y: &TangentField, multiple: f64) -> TraceBudget {
    let speed = y.typical_speed(64).max(1e-300);
    TraceBudget { max_time: multiple * y.sphere.radius / speed, max_steps: 2_000_000 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::OneForm;
    use crate::foliation::field::characteristic_field;
    use crate::foliation::singular::{find_singular_points, SingularOptions};
    use crate::foliation::sphere::SphereSurface;
    use crate::poly::Poly;

    #[test]
    fn gradient_flow_reaches_sink() {
        let s = SphereSurface::default();
        // -grad z: flows to the south pole
        let y = TangentField::gradient("h", s, Poly::var(3, 2), true).unwrap();
        let pts = find_singular_points(&y, &SingularOptions::default()).unwrap();
        let south = pts.iter().find(|p| p.position[2] < 0.0).unwrap().id;
        let o = trace_orbit(&y, &[1.0, 0.0, 0.3], Direction::Forward, &default_budget(&y, 400.0), &pts, None);
        assert_eq!(o.limit, Limit::Singular { id: south });
    }

    #[test]
    fn attracting_equator_cycle_is_detected() {
        let s = SphereSurface::default();
        let y = TangentField::synthetic("eq", s, |q| {
            let (x, yy, z) = (q[0], q[1], q[2]);
            [-yy + x * z * z, x + yy * z * z, -z + z * z * z]
        });
        let pts = find_singular_points(&y, &SingularOptions::default()).unwrap();
        let o = trace_orbit(&y, &[0.8, 0.0, 0.6], Direction::Forward, &default_budget(&y, 400.0), &pts, None);
        match o.limit {
            Limit::Cycle { point, period } => {
                assert!(point[2].abs() < 1e-5);
                assert!((period - 2.0 * std::f64::consts::PI).abs() < 1e-4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn standard_foliation_runs_pole_to_pole() {
        let y = characteristic_field(&OneForm::standard(1), SphereSurface::default()).unwrap();
        let pts = find_singular_points(&y, &SingularOptions::default()).unwrap();
        for x0 in [[0.6, 0.0, 0.8], [0.0, -1.0, 0.0], [0.3, 0.4, -0.866]] {
            let f = trace_orbit(&y, &x0, Direction::Forward, &default_budget(&y, 400.0), &pts, None);
            let b = trace_orbit(&y, &x0, Direction::Backward, &default_budget(&y, 400.0), &pts, None);
            assert_eq!(f.limit, Limit::Singular { id: 1 });
            assert_eq!(b.limit, Limit::Singular { id: 0 });
        }
    }
}
