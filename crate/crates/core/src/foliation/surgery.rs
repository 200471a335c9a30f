//! Local surgeries supported in a small disc U: breaking a limit cycle and removing a loop
//! from a same-sign graph, each by inserting two hyperbolic zeros.
//!
//! Near a regular point x with frame e_s = Y/|Y|, e_t = n x e_s the patch is
//!   Y' = Y - b (k (Y.e_s) e_s + mu t e_t),
//! with b a C^2 bump equal to 1/k at distance R_U/2. The zeros sit at s = -R_U/2 (s-rate
//! -K) and s = +R_U/2 (s-rate +K), K = k |b'| |Y|, and mu fixes the transverse rate there.

use serde::{Deserialize, Serialize};

use super::cycles::CycleStability;
use super::field::TangentField;
use super::report::{analyze, AnalysisOptions, FoliationReport};
use super::singular::{PointType, Sign, SingularPointRecord};
use super::sphere::{add, cross, dot, norm, normalize, scale, sub, V3};
use crate::error::{Error, Result};

const K: f64 = 2.0;
/// |d/du smootherstep| at u = 1/2.
const BUMP_SLOPE: f64 = 1.875;
const START_RADIUS: f64 = 0.3;
const MIN_RADIUS: f64 = 0.02;

fn bump(u: f64) -> f64 {
    if u >= 1.0 {
        return 0.0;
    }
    let u = u.max(0.0);
    1.0 - u * u * u * (u * (6.0 * u - 15.0) + 10.0)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Patch {
    pub center: V3,
    pub radius: f64,
    pub e_s: V3,
    pub e_t: V3,
    pub speed: f64,
    /// Transverse rate of Y at the center.
    pub transverse_rate: f64,
    /// Prescribed transverse rate at the inserted zeros.
    pub target_rate: f64,
}

impl Patch {
    fn new(y: &TangentField, x: &V3, radius: f64, target_factor: f64) -> Patch {
        let s = y.sphere;
        let v = y.eval(x);
        let e_s = normalize(&v);
        let e_t = cross(&s.normal(x), &e_s);
        let h = 1e-5 * s.radius;
        let yt = |d: f64| dot(&y.eval(&s.project(&add(x, &scale(&e_t, d)))), &e_t);
        let a = (yt(h) - yt(-h)) / (2.0 * h);
        let kk = K * BUMP_SLOPE / radius * norm(&v);
        Patch { center: *x, radius, e_s, e_t, speed: norm(&v), transverse_rate: a, target_rate: target_factor * kk }
    }

    fn apply(&self, y: &TangentField, name: &str) -> TangentField {
        let p = *self;
        let s = y.sphere;
        let mu = 2.0 * (p.transverse_rate - p.target_rate);
        y.patched(name, move |q, v| {
            let d = sub(q, &p.center);
            let b = bump(norm(&d) / p.radius);
            if b == 0.0 {
                return v;
            }
            let v = s.tangent_part(q, &v);
            let t = dot(&d, &p.e_t);
            let corr = add(&scale(&p.e_s, K * dot(&v, &p.e_s)), &scale(&p.e_t, mu * t));
            sub(&v, &s.tangent_part(q, &scale(&corr, b)))
        })
    }

    /// The zeros the patch is designed to create, (s = -R/2, s = +R/2).
    pub fn expected_zeros(&self, y: &TangentField) -> [V3; 2] {
        let s = y.sphere;
        [
            s.project(&add(&self.center, &scale(&self.e_s, -0.5 * self.radius))),
            s.project(&add(&self.center, &scale(&self.e_s, 0.5 * self.radius))),
        ]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurgeryRecord {
    pub kind: String,
    pub patch: Patch,
    pub inserted: Vec<SingularPointRecord>,
    pub singular_before: usize,
    pub singular_after: usize,
    pub cycles_before: usize,
    pub cycles_after: usize,
    pub rank_before: [i64; 2],
    pub rank_after: [i64; 2],
    pub verified: bool,
    pub notes: Vec<String>,
}

pub struct SurgeryResult {
    pub field: TangentField,
    pub record: SurgeryRecord,
    pub report: FoliationReport,
}

fn dist_to_polyline(p: &V3, poly: &[V3]) -> f64 {
    super::cycles::polyline_distance(p, poly)
}

/// Picks a patch center on `path` and the largest radius (halving from 0.3 R) for which the
/// disc stays clear of every feature in `avoid` and every singular point.
fn place_patch(y: &TangentField, path: &[V3], points: &[SingularPointRecord], avoid: &[&[V3]]) -> Option<(V3, f64)> {
    let r = y.sphere.radius;
    let clearance = |x: &V3| {
        let a = points.iter().map(|p| norm(&sub(&p.position, x))).fold(f64::INFINITY, f64::min);
        let b = avoid.iter().map(|poly| dist_to_polyline(x, poly)).fold(f64::INFINITY, f64::min);
        a.min(b)
    };
    let mut best: Option<(V3, f64)> = None;
    for x in path.iter().step_by((path.len() / 64).max(1)) {
        if norm(&y.eval(x)) < 1e-3 * y.typical_speed(64) {
            continue;
        }
        let c = clearance(x);
        if best.map_or(true, |(_, bc)| c > bc) {
            best = Some((*x, c));
        }
    }
    let (x, c) = best?;
    let mut rad = START_RADIUS * r;
    while rad >= MIN_RADIUS * r {
        if c > 1.5 * rad {
            return Some((x, rad));
        }
        rad *= 0.5;
    }
    None
}

fn inserted_points(before: &[SingularPointRecord], after: &[SingularPointRecord], r: f64) -> Vec<SingularPointRecord> {
    after
        .iter()
        .filter(|a| !before.iter().any(|b| norm(&sub(&a.position, &b.position)) < 1e-4 * r))
        .cloned()
        .collect()
}

fn has(points: &[SingularPointRecord], t: PointType, sign: Sign) -> bool {
    points.iter().any(|p| p.point_type == Some(t) && p.sign == sign)
}

/// Breaks a non-degenerate cycle by inserting a sink and a negative saddle (attracting
/// cycle) or a positive saddle and a source (repelling cycle).
pub fn break_limit_cycle(y: &TangentField, rep: &FoliationReport, cycle: usize, opts: &AnalysisOptions) -> Result<SurgeryResult> {
    let c = rep.cycles.get(cycle).ok_or_else(|| Error::Precondition(format!("no cycle {cycle}")))?;
    let factor = match c.stability {
        CycleStability::Attracting => -1.5,
        CycleStability::Repelling => 1.5,
        _ => return Err(Error::Degenerate(format!("cycle {cycle} is degenerate (lambda = {:.6e})", c.lambda))),
    };
    let mut avoid: Vec<&[V3]> = rep.cycles.iter().filter(|o| o.id != c.id).map(|o| o.polyline.as_slice()).collect();
    avoid.extend(rep.graphs.separatrices.iter().map(|s| s.polyline.as_slice()));
    let (x, radius) = place_patch(y, &c.polyline, &rep.singular_points, &avoid)
        .ok_or_else(|| Error::Precondition("no patch disc on the cycle clears the other features".into()))?;
    let patch = Patch::new(y, &x, radius, factor);
    let name = format!("{} + broken cycle {cycle}", y.name());
    let field = patch.apply(y, &name);
    let after = analyze(&name, &field, None, opts)?;
    let inserted = inserted_points(&rep.singular_points, &after.singular_points, y.sphere.radius);
    let mut notes = Vec::new();
    let types_ok = match c.stability {
        CycleStability::Attracting => has(&inserted, PointType::Sink, Sign::Negative) && has(&inserted, PointType::Saddle, Sign::Negative),
        _ => has(&inserted, PointType::Source, Sign::Positive) && has(&inserted, PointType::Saddle, Sign::Positive),
    };
    if !types_ok {
        notes.push("inserted points do not have the prescribed types".into());
    }
    let count_ok = after.singular_points.len() == rep.singular_points.len() + 2 && inserted.len() == 2;
    if !count_ok {
        notes.push("singular count did not grow by exactly 2".into());
    }
    let cycles_ok = after.cycles.len() < rep.cycles.len();
    if !cycles_ok {
        notes.push("cycle count did not decrease".into());
    }
    let record = SurgeryRecord {
        kind: "break_limit_cycle".into(),
        patch,
        inserted,
        singular_before: rep.singular_points.len(),
        singular_after: after.singular_points.len(),
        cycles_before: rep.cycles.len(),
        cycles_after: after.cycles.len(),
        rank_before: [rep.graphs.positive.rank, rep.graphs.negative.rank],
        rank_after: [after.graphs.positive.rank, after.graphs.negative.rank],
        verified: types_ok && count_ok && cycles_ok,
        notes,
    };
    Ok(SurgeryResult { field, record, report: after })
}

/// Removes one loop of the graph of the given sign: for the negative graph a sink and a
/// positive saddle are inserted on an edge of the loop (dually for the positive graph).
pub fn eliminate_graph_loop(
    y: &TangentField,
    rep: &FoliationReport,
    sign: Sign,
    loop_index: usize,
    opts: &AnalysisOptions,
) -> Result<SurgeryResult> {
    let g = match sign {
        Sign::Positive => &rep.graphs.positive,
        Sign::Negative => &rep.graphs.negative,
    };
    let lp = g.loops.get(loop_index).ok_or_else(|| Error::Precondition(format!("no loop {loop_index} in the {sign:?} graph")))?;
    let factor = match sign {
        Sign::Negative => -0.5,
        Sign::Positive => 0.5,
    };
    let mut chosen = None;
    for &e in &lp.edges {
        let edge = &g.edges[e];
        let avoid: Vec<&[V3]> = rep
            .graphs
            .separatrices
            .iter()
            .filter(|s| s.id != edge.separatrix)
            .map(|s| s.polyline.as_slice())
            .chain(rep.cycles.iter().map(|c| c.polyline.as_slice()))
            .collect();
        if let Some(pl) = place_patch(y, &edge.polyline, &rep.singular_points, &avoid) {
            if chosen.map_or(true, |(_, r): (V3, f64)| pl.1 > r) {
                chosen = Some(pl);
            }
        }
    }
    let (x, radius) = chosen.ok_or_else(|| Error::Precondition("no patch disc on the loop clears the other features".into()))?;
    let patch = Patch::new(y, &x, radius, factor);
    let name = format!("{} - {sign:?} loop {loop_index}", y.name()).to_lowercase();
    let field = patch.apply(y, &name);
    let after = analyze(&name, &field, None, opts)?;
    let inserted = inserted_points(&rep.singular_points, &after.singular_points, y.sphere.radius);
    let mut notes = Vec::new();
    let types_ok = match sign {
        Sign::Negative => has(&inserted, PointType::Sink, Sign::Negative) && has(&inserted, PointType::Saddle, Sign::Positive),
        Sign::Positive => has(&inserted, PointType::Source, Sign::Positive) && has(&inserted, PointType::Saddle, Sign::Negative),
    };
    if !types_ok {
        notes.push("inserted points do not have the prescribed types".into());
    }
    let before = [rep.graphs.positive.rank, rep.graphs.negative.rank];
    let now = [after.graphs.positive.rank, after.graphs.negative.rank];
    let (i, j) = if sign == Sign::Positive { (0, 1) } else { (1, 0) };
    let rank_ok = now[i] == before[i] - 1 && now[j] == before[j];
    if !rank_ok {
        notes.push(format!("ranks went from {before:?} to {now:?}"));
    }
    let record = SurgeryRecord {
        kind: "eliminate_graph_loop".into(),
        patch,
        singular_before: rep.singular_points.len(),
        singular_after: after.singular_points.len(),
        inserted,
        cycles_before: rep.cycles.len(),
        cycles_after: after.cycles.len(),
        rank_before: before,
        rank_after: now,
        verified: types_ok && rank_ok,
        notes,
    };
    Ok(SurgeryResult { field, record, report: after })
}
