//! Convexity, tightness and structural-stability verdicts from the computed components.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::cycles::{CycleRecord, CycleStability};
use super::graphs::{Connection, GraphLoop, OrbitGraph};
use super::singular::{PointType, SingularPointRecord};

/// Three-valued verdict, serialized as true, false or "inconclusive".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::Yes => s.serialize_bool(true),
            Verdict::No => s.serialize_bool(false),
            Verdict::Inconclusive => s.serialize_str("inconclusive"),
        }
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Verdict, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Bool(true) => Ok(Verdict::Yes),
            serde_json::Value::Bool(false) => Ok(Verdict::No),
            serde_json::Value::String(s) if s == "inconclusive" => Ok(Verdict::Inconclusive),
            other => Err(serde::de::Error::custom(format!("bad verdict {other}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub convex: Verdict,
    pub degenerate_cycles: Vec<usize>,
    pub retrograde_connections: Vec<Connection>,
    pub unresolved_points: Vec<usize>,
    pub unresolved_separatrices: Vec<usize>,
}

pub fn convexity_report(points: &[SingularPointRecord], cycles: &[CycleRecord], g: &OrbitGraph) -> ConvexityReport {
    let degenerate: Vec<usize> = cycles.iter().filter(|c| c.degenerate).map(|c| c.id).collect();
    let unresolved_points: Vec<usize> = points.iter().filter(|p| !p.resolved()).map(|p| p.id).collect();
    let violation = !degenerate.is_empty() || !g.retrograde.is_empty();
    let convex = if violation {
        Verdict::No
    } else if !unresolved_points.is_empty() || !g.unresolved.is_empty() {
        Verdict::Inconclusive
    } else {
        Verdict::Yes
    };
    ConvexityReport {
        convex,
        degenerate_cycles: degenerate,
        retrograde_connections: g.retrograde.clone(),
        unresolved_points,
        unresolved_separatrices: g.unresolved.clone(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TightnessWitness {
    Cycle { id: usize },
    GraphLoop { sign: super::singular::Sign, cycle: GraphLoop },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TightnessReport {
    pub tight: Verdict,
    pub applicable: bool,
    pub witness: Option<TightnessWitness>,
    pub positive_is_tree: bool,
    pub negative_is_tree: bool,
    pub note: Option<String>,
}

/// Graph criterion: no periodic orbit and the full graph a forest. Stated for convex spheres;
/// otherwise the verdict is inconclusive with `applicable = false`.
pub fn tightness_report(cycles: &[CycleRecord], g: &OrbitGraph, convexity: &ConvexityReport) -> TightnessReport {
    let mut rep = TightnessReport {
        tight: Verdict::Inconclusive,
        applicable: convexity.convex == Verdict::Yes,
        witness: None,
        positive_is_tree: g.positive.is_tree(),
        negative_is_tree: g.negative.is_tree(),
        note: None,
    };
    if !rep.applicable {
        rep.note = Some("criterion inapplicable: convexity not established".into());
        return rep;
    }
    if let Some(c) = cycles.first() {
        rep.tight = Verdict::No;
        rep.witness = Some(TightnessWitness::Cycle { id: c.id });
        return rep;
    }
    for graph in [&g.positive, &g.negative] {
        if let Some(l) = graph.loops.first() {
            rep.tight = Verdict::No;
            rep.witness = Some(TightnessWitness::GraphLoop { sign: graph.sign, cycle: l.clone() });
            return rep;
        }
    }
    rep.tight = Verdict::Yes;
    if !(rep.positive_is_tree && rep.negative_is_tree) {
        rep.note = Some("forest verdict but a same-sign graph is disconnected".into());
    }
    rep
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityClass {
    StructurallyStable,
    Q1,
    Q2,
    Q3,
    Other,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub class: StabilityClass,
    pub s1_hyperbolic_points: bool,
    pub s2_hyperbolic_cycles: bool,
    pub s3_no_saddle_connections: bool,
    pub saddle_nodes: Vec<usize>,
    pub degenerate_cycles: Vec<usize>,
    pub saddle_connections: Vec<Connection>,
    pub evidence: Vec<String>,
}

pub fn stability_class(points: &[SingularPointRecord], cycles: &[CycleRecord], g: &OrbitGraph, tol_cycle: f64) -> StabilityReport {
    let mut evidence = Vec::new();
    let saddle_nodes: Vec<usize> =
        points.iter().filter(|p| p.point_type.map_or(false, PointType::is_saddle_node)).map(|p| p.id).collect();
    let unresolved: Vec<usize> = points.iter().filter(|p| !p.resolved()).map(|p| p.id).collect();
    let degenerate: Vec<usize> = cycles.iter().filter(|c| c.degenerate).map(|c| c.id).collect();
    let true_saddle = |i: usize| points[i].point_type == Some(PointType::Saddle);
    let saddle_conn: Vec<Connection> =
        g.saddle_connections.iter().filter(|c| true_saddle(c.from) && true_saddle(c.to)).cloned().collect();
    let s1 = saddle_nodes.is_empty() && unresolved.is_empty();
    let s2 = degenerate.is_empty();
    let s3 = saddle_conn.is_empty();
    let mut rep = StabilityReport {
        class: StabilityClass::Other,
        s1_hyperbolic_points: s1,
        s2_hyperbolic_cycles: s2,
        s3_no_saddle_connections: s3,
        saddle_nodes: saddle_nodes.clone(),
        degenerate_cycles: degenerate.clone(),
        saddle_connections: saddle_conn.clone(),
        evidence: Vec::new(),
    };
    if !unresolved.is_empty() {
        evidence.push(format!("singular points {unresolved:?} not classified at tolerance"));
        rep.evidence = evidence;
        return rep;
    }
    if !g.unresolved.is_empty() {
        evidence.push(format!("{} separatrices unresolved within budget", g.unresolved.len()));
        rep.evidence = evidence;
        return rep;
    }
    let violations = saddle_nodes.len() + degenerate.len() + saddle_conn.len();
    rep.class = match violations {
        0 => StabilityClass::StructurallyStable,
        1 if saddle_nodes.len() == 1 => {
            let sn = saddle_nodes[0];
            let linked = g.separatrices.iter().any(|s| {
                s.point == sn && s.other.map_or(false, |o| points[o].point_type.map_or(false, PointType::is_saddle_like))
            });
            if linked {
                evidence.push(format!("saddle-node {sn} has a separatrix connecting it with a saddle"));
                StabilityClass::Other
            } else {
                evidence.push(format!("saddle-node {sn}; its separatrices avoid saddles"));
                StabilityClass::Q1
            }
        }
        1 if degenerate.len() == 1 => {
            let c = &cycles[degenerate[0]];
            if c.stability == CycleStability::SemiStable && c.second_derivative.abs() > tol_cycle {
                evidence.push(format!("degenerate cycle {} with P'' = {:.3e}", c.id, c.second_derivative));
                StabilityClass::Q2
            } else {
                evidence.push(format!("degenerate cycle {} with vanishing P''", c.id));
                StabilityClass::Other
            }
        }
        1 => {
            let c = &saddle_conn[0];
            evidence.push(format!("one saddle connection {} -> {}", c.from, c.to));
            StabilityClass::Q3
        }
        _ => {
            evidence.push(format!(
                "{} saddle-nodes, {} degenerate cycles, {} saddle connections",
                saddle_nodes.len(),
                degenerate.len(),
                saddle_conn.len()
            ));
            StabilityClass::Other
        }
    };
    rep.evidence = evidence;
    rep
}
