//! Periodic orbits: detection from seed orbits, return-map refinement and multipliers.
//!
//! For a planar flow the derivative of the return map at a periodic orbit is exp of the
//! integral of the divergence over one period; away from the orbit the flux factors of the
//! transversal enter as well:
//!   P'(s) = exp(int div) * Omega(Y, c'(s)) / Omega(Y, c'(P(s))).

use serde::{Deserialize, Serialize};

use super::field::TangentField;
use super::orbit::{default_budget, ode_options, refine_crossing, trace_orbit, Direction, Limit, Section};
use super::singular::SingularPointRecord;
use super::sphere::{cross, dot, norm, sub, V3};
use crate::ode::Stepper;

pub const TOL_CYCLE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleStability {
    Attracting,
    Repelling,
    /// Degenerate, attracting from one side and repelling from the other.
    SemiStable,
    Degenerate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleRecord {
    pub id: usize,
    pub point: V3,
    pub period: f64,
    pub lambda: f64,
    pub degenerate: bool,
    pub stability: CycleStability,
    /// Second derivative of the return map along the transversal (arc length).
    pub second_derivative: f64,
    /// Residual |P(s) - s| at the reported point.
    pub closing_residual: f64,
    pub polyline: Vec<V3>,
}

#[derive(Debug, Clone, Copy)]
pub struct CycleOptions {
    pub seeds: usize,
    pub tol_cycle: f64,
    /// Trace budget in units of radius / typical speed.
    pub budget: f64,
    pub max_cycles: usize,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions { seeds: 48, tol_cycle: TOL_CYCLE, budget: 400.0, max_cycles: 16 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Return {
    pub s: f64,
    pub time: f64,
    pub derivative: f64,
}

fn omega(y: &TangentField, p: &V3, a: &V3, b: &V3) -> f64 {
    dot(&y.sphere.normal(p), &cross(a, b))
}

/// First return to the transversal from coordinate s, with the return-map derivative.
pub fn return_map(y: &TangentField, sec: &Section, s: f64, max_time: f64) -> Option<Return> {
    let r = y.sphere.radius;
    let opts = ode_options(r);
    let start = sec.point(s);
    let v0 = y.eval(&start);
    if dot(&v0, &sec.nrm) <= 0.0 {
        return None;
    }
    let mut f = |z: &[f64], dz: &mut [f64]| {
        let p = [z[0], z[1], z[2]];
        dz[..3].copy_from_slice(&y.eval(&p));
        dz[3] = y.divergence(&p);
    };
    let mut st = Stepper::new(4, 1.0, opts);
    let mut z = vec![start[0], start[1], start[2], 0.0];
    let mut t = 0.0;
    let mut prev_h = 0.0;
    let mut left = false;
    let mut steps = 0;
    while t < max_time && steps < 1_000_000 {
        let z_prev = z.clone();
        let dt = st.step(&mut f, &mut z, max_time - t).ok()?.abs();
        steps += 1;
        let mut p = [z[0], z[1], z[2]];
        if (norm(&sub(&p, &y.sphere.center)) - r).abs() > 1e-11 * r {
            p = y.sphere.project(&p);
            z[..3].copy_from_slice(&p);
            st.invalidate();
        }
        t += dt;
        let h = sec.height(&p);
        if h < 0.0 {
            left = true;
        }
        if left && prev_h < 0.0 && h >= 0.0 && sec.near_half(&p) {
            let (zc, delta) = refine_crossing(y, sec, &z_prev, dt, prev_h, h, 1.0, &opts);
            let pc = y.sphere.project(&[zc[0], zc[1], zc[2]]);
            let s1 = sec.coord(&pc);
            let flux0 = omega(y, &start, &v0, &sec.tangent(s));
            let flux1 = omega(y, &pc, &y.eval(&pc), &sec.tangent(s1));
            let derivative = zc[3].exp() * flux0 / flux1;
            return Some(Return { s: s1, time: t - dt + delta, derivative });
        }
        prev_h = h;
    }
    None
}

fn sample_orbit(y: &TangentField, start: &V3, period: f64) -> Vec<V3> {
    let n = 200;
    let opts = ode_options(y.sphere.radius);
    let mut out = Vec::with_capacity(n + 1);
    let mut z = start.to_vec();
    out.push(*start);
    let f = |a: &[f64], da: &mut [f64]| da.copy_from_slice(&y.eval(&[a[0], a[1], a[2]]));
    for _ in 0..n {
        z = crate::ode::integrate(f, &z, period / n as f64, &opts).unwrap_or(z);
        let p = y.sphere.project(&[z[0], z[1], z[2]]);
        z.copy_from_slice(&p);
        out.push(p);
    }
    out
}

/// Refines a periodic orbit through (or near) x and measures its multiplier.
pub fn refine_cycle(y: &TangentField, x: &V3, tol_cycle: f64, max_time: f64) -> Option<CycleRecord> {
    let r = y.sphere.radius;
    let sec = Section::new(y, x, 1.0)?;
    let mut s = 0.0;
    let mut ret = return_map(y, &sec, s, max_time)?;
    for _ in 0..80 {
        let g = ret.s - s;
        if g.abs() < 1e-12 * r {
            break;
        }
        let d = ret.derivative - 1.0;
        let step = if d.abs() > 1e-14 { g / d } else { -g };
        let step = step.clamp(-0.05 * r, 0.05 * r);
        s -= step;
        ret = return_map(y, &sec, s, max_time)?;
        if step.abs() < 1e-14 * r {
            break;
        }
    }
    let mut residual = (ret.s - s).abs();
    if residual > 1e-7 * r {
        return None;
    }
    // near-degenerate orbits: the double root of P(s) - s is located more precisely as the
    // root of P'(s) - 1
    if (ret.derivative - 1.0).abs() < 1e-3 {
        let mut a = s;
        let mut fa = ret.derivative - 1.0;
        let mut b = s + 1e-4 * r;
        let mut fb = return_map(y, &sec, b, max_time).map(|q| q.derivative - 1.0);
        let mut best: Option<(f64, Return)> = None;
        for _ in 0..40 {
            let Some(fbv) = fb else { break };
            if (fbv - fa).abs() < 1e-300 {
                break;
            }
            let c = b - fbv * (b - a) / (fbv - fa);
            if (c - s).abs() > 1e-2 * r {
                break;
            }
            let Some(rc) = return_map(y, &sec, c, max_time) else { break };
            a = b;
            fa = fbv;
            b = c;
            fb = Some(rc.derivative - 1.0);
            best = Some((c, rc));
            if (rc.derivative - 1.0).abs() < 1e-12 || (b - a).abs() < 1e-13 * r {
                break;
            }
        }
        if let Some((c, rc)) = best {
            if (rc.s - c).abs() < 1e-9 * r && (rc.derivative - 1.0).abs() < (ret.derivative - 1.0).abs() {
                s = c;
                ret = rc;
                residual = (rc.s - c).abs();
            }
        }
    }
    let lambda = ret.derivative;
    let degenerate = (lambda - 1.0).abs() <= tol_cycle;
    let h = 1e-3 * r;
    let second = match (return_map(y, &sec, s + h, max_time), return_map(y, &sec, s - h, max_time)) {
        (Some(a), Some(b)) => (a.derivative - b.derivative) / (2.0 * h),
        _ => f64::NAN,
    };
    let stability = if !degenerate {
        if lambda < 1.0 {
            CycleStability::Attracting
        } else {
            CycleStability::Repelling
        }
    } else if second.is_finite() && second.abs() > tol_cycle {
        CycleStability::SemiStable
    } else {
        CycleStability::Degenerate
    };
    let point = sec.point(s);
    Some(CycleRecord {
        id: 0,
        point,
        period: ret.time,
        lambda,
        degenerate,
        stability,
        second_derivative: second,
        closing_residual: residual,
        polyline: sample_orbit(y, &point, ret.time),
    })
}

/// Distance from p to a closed polyline.
pub fn polyline_distance(p: &V3, poly: &[V3]) -> f64 {
    let mut best = f64::INFINITY;
    for w in poly.windows(2) {
        let d = sub(&w[1], &w[0]);
        let l2 = dot(&d, &d);
        let t = if l2 > 0.0 { (dot(&sub(p, &w[0]), &d) / l2).clamp(0.0, 1.0) } else { 0.0 };
        let q = [w[0][0] + t * d[0], w[0][1] + t * d[1], w[0][2] + t * d[2]];
        best = best.min(norm(&sub(p, &q)));
    }
    best
}

/// Detects periodic orbits by tracing seed orbits in both directions.
pub fn find_limit_cycles(y: &TangentField, points: &[SingularPointRecord], opts: &CycleOptions) -> Vec<CycleRecord> {
    let r = y.sphere.radius;
    let budget = default_budget(y, opts.budget);
    let max_return = budget.max_time;
    let mut cycles: Vec<CycleRecord> = Vec::new();
    let known = |p: &V3, cycles: &[CycleRecord]| cycles.iter().any(|c| polyline_distance(p, &c.polyline) < 1e-3 * r);
    for seed in y.sphere.fibonacci_points(opts.seeds) {
        if points.iter().any(|pt| norm(&sub(&pt.position, &seed)) < 1e-2 * r) {
            continue;
        }
        for dir in [Direction::Forward, Direction::Backward] {
            if cycles.len() >= opts.max_cycles {
                break;
            }
            let o = trace_orbit(y, &seed, dir, &budget, points, None);
            let cand = match o.limit {
                Limit::Cycle { point, .. } => Some(point),
                _ => o.cycle_candidate,
            };
            let Some(c) = cand else { continue };
            if known(&c, &cycles) {
                continue;
            }
            if let Some(mut rec) = refine_cycle(y, &c, opts.tol_cycle, max_return) {
                if !known(&rec.point, &cycles) {
                    rec.id = cycles.len();
                    cycles.push(rec);
                }
            }
        }
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::singular::{find_singular_points, SingularOptions};
    use crate::foliation::sphere::SphereSurface;

    fn equator(beta: fn(f64) -> f64) -> TangentField {
        TangentField::synthetic("eq", SphereSurface::default(), move |q| {
            let (x, y, z) = (q[0], q[1], q[2]);
            let b = beta(z);
            [-y - b * x * z, x - b * y * z, b * (1.0 - z * z)]
        })
    }

    #[test]
    fn attracting_cycle_multiplier() {
        let y = equator(|z| -z);
        let pts = find_singular_points(&y, &SingularOptions::default()).unwrap();
        let cs = find_limit_cycles(&y, &pts, &CycleOptions::default());
        assert_eq!(cs.len(), 1);
        // z' = -z(1 - z^2) linearizes to -z; one turn takes 2 pi
        let expected = (-2.0 * std::f64::consts::PI).exp();
        assert!((cs[0].lambda - expected).abs() < 1e-7, "{}", cs[0].lambda);
        assert_eq!(cs[0].stability, CycleStability::Attracting);
    }

    #[test]
    fn repelling_cycle_found_backwards() {
        let y = equator(|z| z);
        let pts = find_singular_points(&y, &SingularOptions::default()).unwrap();
        let cs = find_limit_cycles(&y, &pts, &CycleOptions::default());
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].stability, CycleStability::Repelling);
    }

    #[test]
    fn degenerate_cycle_flagged() {
        let y = equator(|z| z * z);
        let pts = find_singular_points(&y, &SingularOptions::default()).unwrap();
        let cs = find_limit_cycles(&y, &pts, &CycleOptions::default());
        assert_eq!(cs.len(), 1, "{cs:?}");
        assert!(cs[0].degenerate, "lambda {}", cs[0].lambda);
        assert_eq!(cs[0].stability, CycleStability::SemiStable);
    }
}
