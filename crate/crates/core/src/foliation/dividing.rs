//! Dividing sets: the zero set of p -> alpha_p(X(p)) on the sphere for a transverse contact
//! field X, by marching triangles on a subdivided icosahedron.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::sphere::{dot, icosphere, normalize, Mesh, SphereSurface, V3};
use crate::contact::{OneForm, VectorField};
use crate::error::{Error, Result};

pub const DEFAULT_LEVEL: usize = 6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DividingSet {
    pub components: usize,
    pub curves: Vec<Vec<V3>>,
    /// min |<X, n>| / |X| over mesh vertices.
    pub transversality_margin: f64,
    pub mesh_level: usize,
    pub perturbed: bool,
}

fn rotate(v: &V3, a: f64) -> V3 {
    // small fixed rotation about (1, 2, 3)/sqrt(14)
    let k = normalize(&[1.0, 2.0, 3.0]);
    let (c, s) = (a.cos(), a.sin());
    let kv = dot(&k, v);
    let kx = super::sphere::cross(&k, v);
    [
        v[0] * c + kx[0] * s + k[0] * kv * (1.0 - c),
        v[1] * c + kx[1] * s + k[1] * kv * (1.0 - c),
        v[2] * c + kx[2] * s + k[2] * kv * (1.0 - c),
    ]
}

fn find(parent: &mut Vec<usize>, i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

fn march(mesh: &Mesh, pts: &[V3], vals: &[f64]) -> Option<(usize, Vec<Vec<V3>>)> {
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    if vals.iter().any(|v| v.abs() < 1e-13 * scale) {
        return None;
    }
    let mut edge_id: HashMap<(usize, usize), usize> = HashMap::new();
    let mut crossing: Vec<V3> = Vec::new();
    let mut segs: Vec<(usize, usize)> = Vec::new();
    for t in &mesh.triangles {
        let mut ends = Vec::with_capacity(2);
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if (vals[a] > 0.0) != (vals[b] > 0.0) {
                let key = (a.min(b), a.max(b));
                let id = *edge_id.entry(key).or_insert_with(|| {
                    let w = vals[a] / (vals[a] - vals[b]);
                    crossing.push([
                        pts[a][0] + w * (pts[b][0] - pts[a][0]),
                        pts[a][1] + w * (pts[b][1] - pts[a][1]),
                        pts[a][2] + w * (pts[b][2] - pts[a][2]),
                    ]);
                    crossing.len() - 1
                });
                ends.push(id);
            }
        }
        if ends.len() == 2 {
            segs.push((ends[0], ends[1]));
        }
    }
    let n = crossing.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &segs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    // chain each component into a polyline
    let mut seen = vec![false; n];
    let mut curves = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut curve = vec![crossing[start]];
        seen[start] = true;
        let mut cur = start;
        loop {
            let next = adj[cur].iter().copied().find(|&w| !seen[w]);
            match next {
                Some(w) => {
                    seen[w] = true;
                    curve.push(crossing[w]);
                    cur = w;
                }
                None => break,
            }
        }
        if adj[cur].contains(&start) {
            curve.push(crossing[start]);
        }
        curves.push(curve);
    }
    Some((roots.len(), curves))
}

pub fn dividing_set(sphere: &SphereSurface, form: &OneForm, x: &VectorField, level: usize) -> Result<DividingSet> {
    if form.dim != 3 || x.dim != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: form.dim.min(x.dim) });
    }
    let mesh = icosphere(level);
    for attempt in 0..2 {
        let pts: Vec<V3> = mesh
            .vertices
            .iter()
            .map(|v| {
                let v = if attempt == 0 { *v } else { rotate(v, 0.0123) };
                sphere.from_q(&v)
            })
            .collect();
        let mut margin = f64::INFINITY;
        let mut vals = Vec::with_capacity(pts.len());
        for p in &pts {
            let xv = x.eval(p);
            let xn = (xv[0] * xv[0] + xv[1] * xv[1] + xv[2] * xv[2]).sqrt();
            let n = sphere.normal(p);
            let tr = if xn > 0.0 { (xv[0] * n[0] + xv[1] * n[1] + xv[2] * n[2]) / xn } else { 0.0 };
            margin = margin.min(tr.abs());
            if tr.abs() < 1e-9 {
                return Err(Error::NotTransverse(format!("X is tangent to the sphere at {p:?}")));
            }
            vals.push(form.eval(p, &xv));
        }
        // the sign of <X, n> must be constant
        let s0 = {
            let xv = x.eval(&pts[0]);
            dot(&[xv[0], xv[1], xv[2]], &sphere.normal(&pts[0])) > 0.0
        };
        for p in &pts {
            let xv = x.eval(p);
            if (dot(&[xv[0], xv[1], xv[2]], &sphere.normal(p)) > 0.0) != s0 {
                return Err(Error::NotTransverse(format!("X crosses the sphere in both directions (e.g. at {p:?})")));
            }
        }
        if let Some((components, curves)) = march(&mesh, &pts, &vals) {
            return Ok(DividingSet { components, curves, transversality_margin: margin, mesh_level: level, perturbed: attempt > 0 });
        }
    }
    Err(Error::Degenerate("dividing set passes through mesh vertices even after perturbation".into()))
}
