//! Separatrices, the graphs of same-sign connections and their first Betti numbers.
//!
//! A positive node is a source and a negative node a sink, so an orbit joining two singular
//! points of equal sign always ends (positive case) or starts (negative case) at a saddle or
//! saddle-node. Tracing every separatrix therefore finds every edge.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::field::TangentField;
use super::orbit::{default_budget, trace_orbit, Direction, Limit};
use super::singular::{Sign, SingularPointRecord};
use super::sphere::{add, scale, V3};

/// Offset of separatrix seeds from the saddle, relative to the radius.
pub const SEPARATRIX_OFFSET: f64 = 2e-4;
/// Offset along the slow direction of a saddle-node.
pub const CENTER_OFFSET: f64 = 1e-2;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Separatrix {
    pub id: usize,
    pub point: usize,
    pub outgoing: bool,
    pub limit: Limit,
    /// The singular point at the other end, if the orbit converges to one.
    pub other: Option<usize>,
    pub polyline: Vec<V3>,
}

impl Separatrix {
    pub fn resolved(&self) -> bool {
        !matches!(self.limit, Limit::BudgetExhausted)
    }

    /// (alpha-limit, omega-limit) singular points when both are known.
    pub fn ends(&self) -> Option<(usize, usize)> {
        let o = self.other?;
        Some(if self.outgoing { (self.point, o) } else { (o, self.point) })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphEdge {
    pub id: usize,
    pub a: usize,
    pub b: usize,
    pub separatrix: usize,
    pub polyline: Vec<V3>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphLoop {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Graph {
    pub sign: Sign,
    pub vertices: Vec<usize>,
    pub edges: Vec<GraphEdge>,
    pub components: usize,
    pub rank: i64,
    /// One loop per independent cycle (a cycle basis).
    pub loops: Vec<GraphLoop>,
}

impl Graph {
    pub fn is_forest(&self) -> bool {
        self.rank == 0
    }

    pub fn is_tree(&self) -> bool {
        self.rank == 0 && self.components == 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub from: usize,
    pub to: usize,
    pub separatrix: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitGraph {
    pub positive: Graph,
    pub negative: Graph,
    /// rank H_1 of the full graph (disjoint union of the two).
    pub rank: i64,
    pub separatrices: Vec<Separatrix>,
    pub unresolved: Vec<usize>,
    /// Orbits between two saddles or saddle-nodes, deduplicated.
    pub saddle_connections: Vec<Connection>,
    /// Connections from a negative to a positive singular point.
    pub retrograde: Vec<Connection>,
    /// Edges are those found by tracing; completeness is not certified.
    pub completeness: String,
}

fn find(parent: &mut Vec<usize>, i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let n = parent[j];
        parent[j] = r;
        j = n;
    }
    r
}

/// Components, rank and a cycle basis of a multigraph.
pub fn graph_homology(vertices: &[usize], edges: &[(usize, usize)]) -> (usize, i64, Vec<GraphLoop>) {
    let idx: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut tree_adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut extra = Vec::new();
    for (e, (a, b)) in edges.iter().enumerate() {
        let (ia, ib) = (idx[a], idx[b]);
        let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
        if ra == rb {
            extra.push(e);
        } else {
            parent[ra] = rb;
            tree_adj[ia].push((ib, e));
            tree_adj[ib].push((ia, e));
        }
    }
    let comps = (0..n).filter(|&i| find(&mut parent, i) == i).count();
    let rank = edges.len() as i64 - n as i64 + comps as i64;
    let mut loops = Vec::new();
    for e in extra {
        let (a, b) = edges[e];
        let (ia, ib) = (idx[&a], idx[&b]);
        // tree path from ib to ia
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([ib]);
        seen[ib] = true;
        while let Some(v) = q.pop_front() {
            if v == ia {
                break;
            }
            for &(w, te) in &tree_adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, te));
                    q.push_back(w);
                }
            }
        }
        let mut vs = vec![vertices[ia]];
        let mut es = vec![e];
        let mut cur = ia;
        while let Some((p, te)) = prev[cur] {
            es.push(te);
            vs.push(vertices[p]);
            cur = p;
        }
        loops.push(GraphLoop { vertices: vs, edges: es });
    }
    (comps, rank, loops)
}

/// Traces every separatrix of the saddles and saddle-nodes.
pub fn trace_separatrices(y: &TangentField, points: &[SingularPointRecord], budget_multiple: f64) -> Vec<Separatrix> {
    let r = y.sphere.radius;
    let budget = default_budget(y, budget_multiple);
    let mut out = Vec::new();
    for pt in points {
        let Some(pt_type) = pt.point_type else { continue };
        for (k, sep) in pt.separatrices.iter().enumerate() {
            let center = pt_type.is_saddle_node() && k == 2;
            let off = if center { CENTER_OFFSET } else { SEPARATRIX_OFFSET } * r;
            let x0 = y.sphere.project(&add(&pt.position, &scale(&sep.direction, off)));
            let dir = if sep.outgoing { Direction::Forward } else { Direction::Backward };
            let o = trace_orbit(y, &x0, dir, &budget, points, Some((pt.id, 3.0 * SEPARATRIX_OFFSET * r)));
            let other = match o.limit {
                Limit::Singular { id } => Some(id),
                _ => None,
            };
            let mut poly = vec![pt.position];
            poly.extend(o.polyline);
            if !sep.outgoing {
                poly.reverse();
            }
            out.push(Separatrix { id: out.len(), point: pt.id, outgoing: sep.outgoing, limit: o.limit, other, polyline: poly });
        }
    }
    out
}

/// Deduplicates connections between two saddle-like points, which are seen from both ends.
fn dedup_connections(seps: &[Separatrix], points: &[SingularPointRecord], pred: impl Fn(usize, usize) -> bool) -> Vec<Connection> {
    let saddle = |i: usize| points[i].point_type.map_or(false, |t| t.is_saddle_like());
    let mut groups: BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for s in seps {
        let Some((a, b)) = s.ends() else { continue };
        if !pred(a, b) {
            continue;
        }
        let g = groups.entry((a, b)).or_default();
        if s.outgoing {
            g.0.push(s.id);
        } else {
            g.1.push(s.id);
        }
    }
    let mut out = Vec::new();
    for ((a, b), (outs, ins)) in groups {
        let both = saddle(a) && saddle(b);
        let mut keep = outs.clone();
        if both {
            keep.extend(ins.iter().skip(outs.len()));
        } else {
            keep.extend(ins);
        }
        for s in keep {
            out.push(Connection { from: a, to: b, separatrix: s });
        }
    }
    out
}

pub fn build_graphs(y: &TangentField, points: &[SingularPointRecord], budget_multiple: f64) -> OrbitGraph {
    let seps = trace_separatrices(y, points, budget_multiple);
    graphs_from_separatrices(points, seps)
}

pub fn graphs_from_separatrices(points: &[SingularPointRecord], seps: Vec<Separatrix>) -> OrbitGraph {
    let sign = |i: usize| points[i].sign;
    let saddle = |i: usize| points[i].point_type.map_or(false, |t| t.is_saddle_like());
    let same = dedup_connections(&seps, points, |a, b| sign(a) == sign(b));
    let retro = dedup_connections(&seps, points, |a, b| sign(a) == Sign::Negative && sign(b) == Sign::Positive);
    let saddle_conn = dedup_connections(&seps, points, |a, b| saddle(a) && saddle(b));
    let mk = |sg: Sign| {
        let vertices: Vec<usize> = points.iter().filter(|p| p.sign == sg).map(|p| p.id).collect();
        let edges: Vec<GraphEdge> = same
            .iter()
            .filter(|c| sign(c.from) == sg)
            .enumerate()
            .map(|(i, c)| GraphEdge {
                id: i,
                a: c.from,
                b: c.to,
                separatrix: c.separatrix,
                polyline: seps[c.separatrix].polyline.clone(),
            })
            .collect();
        let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.a, e.b)).collect();
        let (components, rank, loops) = graph_homology(&vertices, &pairs);
        Graph { sign: sg, vertices, edges, components, rank, loops }
    };
    let positive = mk(Sign::Positive);
    let negative = mk(Sign::Negative);
    let unresolved = seps.iter().filter(|s| !s.resolved()).map(|s| s.id).collect();
    OrbitGraph {
        rank: positive.rank + negative.rank,
        positive,
        negative,
        separatrices: seps,
        unresolved,
        saddle_connections: saddle_conn,
        retrograde: retro,
        completeness: "found".into(),
    }
}
