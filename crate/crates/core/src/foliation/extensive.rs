//! Extensive curves: closed curves meeting every cycle, every graph loop and every saddle
//! connection transversally.

use serde::{Deserialize, Serialize};

use super::field::TangentField;
use super::report::FoliationReport;
use super::sphere::{cross, dot, norm, normalize, scale, sub, SphereSurface, V3};
use super::verdicts::StabilityClass;
use crate::error::{Error, Result};

/// Minimal angle between the curve and Y at a transverse crossing.
pub const ANGLE_TOL: f64 = 1e-3;
const CURVE_POINTS: usize = 720;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Crossing {
    pub point: V3,
    /// Angle between the curve and the orbit (radians).
    pub angle: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionEvidence {
    pub target: String,
    pub satisfied: bool,
    pub witness: Option<Crossing>,
    pub crossings: usize,
    pub tangential_contacts: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtensiveReport {
    pub extensive: bool,
    pub e1_cycles: Vec<ConditionEvidence>,
    pub e2_loops: Vec<ConditionEvidence>,
    pub e3_saddle_connections: Vec<ConditionEvidence>,
}

impl ExtensiveReport {
    pub fn failures(&self) -> usize {
        self.e1_cycles.iter().chain(&self.e2_loops).chain(&self.e3_saddle_connections).filter(|c| !c.satisfied).count()
    }
}

enum ArcHit {
    Point(V3),
    Overlap,
}

fn within(a: &V3, b: &V3, n: &V3, x: &V3) -> bool {
    dot(&cross(a, x), n) >= -1e-15 && dot(&cross(x, b), n) >= -1e-15
}

/// Intersection of the short great-circle arcs a1a2 and b1b2 on the unit sphere.
fn arc_intersection(a1: &V3, a2: &V3, b1: &V3, b2: &V3) -> Option<ArcHit> {
    let n1 = cross(a1, a2);
    let n2 = cross(b1, b2);
    if norm(&n1) < 1e-15 || norm(&n2) < 1e-15 {
        return None;
    }
    let d = cross(&n1, &n2);
    if norm(&d) < 1e-12 * norm(&n1) * norm(&n2) {
        // same great circle: overlap when an endpoint of one lies on the other
        let hit = within(a1, a2, &n1, b1) || within(a1, a2, &n1, b2) || within(b1, b2, &n2, a1);
        return hit.then_some(ArcHit::Overlap);
    }
    let d = normalize(&d);
    for x in [d, scale(&d, -1.0)] {
        if dot(&x, a1) > 0.0 && dot(&x, b1) > 0.0 && within(a1, a2, &n1, &x) && within(b1, b2, &n2, &x) {
            return Some(ArcHit::Point(x));
        }
    }
    None
}

fn unit(s: &SphereSurface, p: &V3) -> V3 {
    normalize(&sub(p, &s.center))
}

/// Crossings of the curve with an orbit polyline, with the angle to Y at each.
fn crossings(y: &TangentField, curve: &[V3], orbit: &[V3]) -> (Vec<Crossing>, usize) {
    let s = y.sphere;
    let cu: Vec<V3> = curve.iter().map(|p| unit(&s, p)).collect();
    let ou: Vec<V3> = orbit.iter().map(|p| unit(&s, p)).collect();
    let mut out = Vec::new();
    let mut tangential = 0;
    for a in cu.windows(2) {
        let n1 = normalize(&cross(&a[0], &a[1]));
        for b in ou.windows(2) {
            match arc_intersection(&a[0], &a[1], &b[0], &b[1]) {
                Some(ArcHit::Point(x)) => {
                    let p = s.from_q(&x);
                    let v = y.eval(&p);
                    let vn = norm(&v);
                    if vn < 1e-12 * s.radius {
                        tangential += 1;
                        continue;
                    }
                    let angle = (dot(&v, &n1).abs() / vn).min(1.0).asin();
                    if angle > ANGLE_TOL {
                        out.push(Crossing { point: p, angle });
                    } else {
                        tangential += 1;
                    }
                }
                Some(ArcHit::Overlap) => tangential += 1,
                None => {}
            }
        }
    }
    (out, tangential)
}

fn evidence(target: String, y: &TangentField, curve: &[V3], orbits: &[&[V3]]) -> ConditionEvidence {
    let mut all = Vec::new();
    let mut tangential = 0;
    for o in orbits {
        let (c, t) = crossings(y, curve, o);
        all.extend(c);
        tangential += t;
    }
    let witness = all.iter().cloned().max_by(|a, b| a.angle.total_cmp(&b.angle));
    ConditionEvidence { target, satisfied: witness.is_some(), witness, crossings: all.len(), tangential_contacts: tangential }
}

/// Checks that a closed polyline on the sphere has no self-intersections.
pub fn check_embedded(s: &SphereSurface, curve: &[V3]) -> Result<()> {
    if curve.len() < 4 {
        return Err(Error::Precondition("curve needs at least 3 distinct points".into()));
    }
    if norm(&sub(&curve[0], &curve[curve.len() - 1])) > 1e-9 * s.radius {
        return Err(Error::Precondition("curve is not closed (first and last points differ)".into()));
    }
    let u: Vec<V3> = curve.iter().map(|p| unit(s, p)).collect();
    let m = u.len() - 1;
    for i in 0..m {
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            if arc_intersection(&u[i], &u[i + 1], &u[j], &u[j + 1]).is_some() {
                return Err(Error::Precondition(format!("curve is not embedded: segments {i} and {j} meet")));
            }
        }
    }
    Ok(())
}

/// Great circle with the given normal, as a closed polyline.
pub fn great_circle(s: &SphereSurface, normal: &V3, n: usize) -> Vec<V3> {
    let k = normalize(normal);
    let seed = if k[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize(&cross(&k, &seed));
    let e2 = cross(&k, &e1);
    (0..=n)
        .map(|i| {
            let t = std::f64::consts::TAU * (i % n) as f64 / n as f64;
            let (c, sn) = (t.cos(), t.sin());
            s.from_q(&[c * e1[0] + sn * e2[0], c * e1[1] + sn * e2[1], c * e1[2] + sn * e2[2]])
        })
        .collect()
}

pub fn extensive_report(curve: &[V3], y: &TangentField, rep: &FoliationReport) -> Result<ExtensiveReport> {
    check_embedded(&y.sphere, curve)?;
    let e1: Vec<ConditionEvidence> =
        rep.cycles.iter().map(|c| evidence(format!("cycle {}", c.id), y, curve, &[&c.polyline])).collect();
    let mut e2 = Vec::new();
    for g in [&rep.graphs.positive, &rep.graphs.negative] {
        for (k, l) in g.loops.iter().enumerate() {
            let orbits: Vec<&[V3]> = l.edges.iter().map(|&e| g.edges[e].polyline.as_slice()).collect();
            e2.push(evidence(format!("{:?} loop {k}", g.sign).to_lowercase(), y, curve, &orbits));
        }
    }
    let e3: Vec<ConditionEvidence> = rep
        .stability
        .saddle_connections
        .iter()
        .map(|c| {
            let poly = &rep.graphs.separatrices[c.separatrix].polyline;
            evidence(format!("connection {} -> {}", c.from, c.to), y, curve, &[poly])
        })
        .collect();
    let extensive = e1.iter().chain(&e2).chain(&e3).all(|c| c.satisfied);
    Ok(ExtensiveReport { extensive, e1_cycles: e1, e2_loops: e2, e3_saddle_connections: e3 })
}

/// Directions of the icosahedral great circles (vertices, face centers, edge midpoints).
fn icosahedral_normals() -> Vec<V3> {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts = Vec::new();
    for a in [-1.0, 1.0] {
        for b in [-p, p] {
            verts.push([0.0, a, b]);
            verts.push([a, b, 0.0]);
            verts.push([b, 0.0, a]);
        }
    }
    let verts: Vec<V3> = verts.iter().map(normalize).collect();
    let edge_len = 2.0 / (p * p + 1.0).sqrt();
    let mut dirs = verts.clone();
    for i in 0..12 {
        for j in i + 1..12 {
            if (norm(&sub(&verts[i], &verts[j])) - edge_len).abs() < 1e-9 {
                dirs.push(normalize(&[verts[i][0] + verts[j][0], verts[i][1] + verts[j][1], verts[i][2] + verts[j][2]]));
                for k in j + 1..12 {
                    if (norm(&sub(&verts[i], &verts[k])) - edge_len).abs() < 1e-9
                        && (norm(&sub(&verts[j], &verts[k])) - edge_len).abs() < 1e-9
                    {
                        let c = [
                            verts[i][0] + verts[j][0] + verts[k][0],
                            verts[i][1] + verts[j][1] + verts[k][1],
                            verts[i][2] + verts[j][2] + verts[k][2],
                        ];
                        dirs.push(normalize(&c));
                    }
                }
            }
        }
    }
    // antipodal directions give the same circle
    let mut out: Vec<V3> = Vec::new();
    for d in dirs {
        if !out.iter().any(|o| dot(o, &d).abs() > 1.0 - 1e-9) {
            out.push(d);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtensiveSearch {
    pub found: bool,
    pub normal: V3,
    pub curve: Vec<V3>,
    pub report: ExtensiveReport,
    pub candidates_tried: usize,
}

/// Searches great circles in icosahedral directions, then small tilts of each.
pub fn find_extensive_curve(y: &TangentField, rep: &FoliationReport) -> Result<ExtensiveSearch> {
    if rep.verdicts.stability_class == StabilityClass::Other {
        return Err(Error::Precondition(
            "extensive curves are searched only for structurally stable or quasi-generic foliations".into(),
        ));
    }
    let s = y.sphere;
    let base = icosahedral_normals();
    let mut candidates = base.clone();
    for tilt in [0.05, 0.13] {
        for d in &base {
            let (e1, e2) = s.tangent_basis(&s.from_q(d));
            for e in [e1, e2] {
                candidates.push(normalize(&[d[0] + tilt * e[0], d[1] + tilt * e[1], d[2] + tilt * e[2]]));
            }
        }
    }
    let mut best: Option<ExtensiveSearch> = None;
    let mut tried = 0;
    for n in candidates {
        // avoid circles through singular points
        if rep.singular_points.iter().any(|p| dot(&unit(&s, &p.position), &n).abs() < 1e-2) {
            continue;
        }
        tried += 1;
        let curve = great_circle(&s, &n, CURVE_POINTS);
        let r = extensive_report(&curve, y, rep)?;
        let better = best.as_ref().map_or(true, |b| r.failures() < b.report.failures());
        let done = r.extensive;
        if better {
            best = Some(ExtensiveSearch { found: done, normal: n, curve, report: r, candidates_tried: tried });
        }
        if done {
            break;
        }
    }
    let mut b = best.ok_or_else(|| Error::Budget("every candidate circle passes through a singular point".into()))?;
    b.candidates_tried = tried;
    Ok(b)
}
