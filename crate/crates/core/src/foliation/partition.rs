//! Three-chart partitions of S^2 x S^1 and S^3 built from a family of tightening curves.
//!
//! Work happens in product coordinates (q, tau) with q on the unit sphere and the curve
//! gamma_tau identified with the equator. With D = {z >= 0}, D' = {z <= 0},
//! D+ = {z >= -eta} and D'- = {z <= -eta}:
//!   C1 = D+ x J_odd,  C2 = D' x J_even,  C3 = D'- x J_odd  u  D x J_even,
//! and for S^3 the caps B1 (tau >= end) and B0 (tau <= start) join C1 and C2.

use serde::{Deserialize, Serialize};

use super::sphere::SphereSurface;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    S3,
    S2xS1,
}

/// A declared tightness neighbourhood V_tau = [tau - margin, tau + margin].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FamilyMember {
    pub tau: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionInput {
    pub model: Model,
    pub family: Vec<FamilyMember>,
    /// Breakpoints t_0 < ... < t_{2k}; J_i = [t_{i-1}, t_i].
    pub subdivision: Vec<f64>,
    #[serde(default = "default_eta")]
    pub eta: f64,
}

fn default_eta() -> f64 {
    0.25
}

impl PartitionInput {
    /// Constant equator family on [0, 1] with m members and a uniform subdivision into 2k
    /// intervals.
    pub fn uniform(model: Model, members: usize, k: usize) -> PartitionInput {
        let m = members.max(1);
        let family = (0..=m).map(|j| FamilyMember { tau: j as f64 / m as f64, margin: 1.0 / m as f64 }).collect();
        let n = 2 * k;
        PartitionInput { model, family, subdivision: (0..=n).map(|i| i as f64 / n as f64).collect(), eta: default_eta() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Piece {
    /// {z_min <= z <= z_max} x [tau_min, tau_max].
    Slab { disc: &'static str, z_min: f64, z_max: f64, tau_min: f64, tau_max: f64 },
    /// Polar cap ball of S^3: tau <= bound (B0) or tau >= bound (B1).
    Cap { name: &'static str, bound: f64, below: bool },
}

impl Piece {
    fn contains(&self, z: f64, tau: f64) -> bool {
        match *self {
            Piece::Slab { z_min, z_max, tau_min, tau_max, .. } => z >= z_min && z <= z_max && tau >= tau_min && tau <= tau_max,
            Piece::Cap { bound, below, .. } => {
                if below {
                    tau <= bound
                } else {
                    tau >= bound
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChartRegion {
    pub index: usize,
    pub components: Vec<Piece>,
    /// Minimal product-metric distance between distinct components (None for one component).
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Coverage {
    pub grid_points: usize,
    pub covered: usize,
    /// Grid points lying in two components of the same chart.
    pub overlaps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub model: Model,
    pub eta: f64,
    pub charts: Vec<ChartRegion>,
    pub coverage: Coverage,
    pub covers: bool,
    pub disjoint: bool,
}

fn ring(z: f64) -> f64 {
    (1.0 - z * z).max(0.0).sqrt()
}

/// Chordal distance between two latitude bands on the unit sphere.
fn band_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    if a.1 < b.0 {
        let (z1, z2) = (a.1, b.0);
        ((ring(z1) - ring(z2)).powi(2) + (z1 - z2).powi(2)).sqrt()
    } else if b.1 < a.0 {
        band_distance(b, a)
    } else {
        0.0
    }
}

fn interval_distance(a: (f64, f64), b: (f64, f64), circular: bool) -> f64 {
    let d = if a.1 < b.0 {
        b.0 - a.1
    } else if b.1 < a.0 {
        a.0 - b.1
    } else {
        return 0.0;
    };
    if circular {
        // tau lives on R / Z
        let wrap = (a.0 + 1.0 - b.1).max(0.0).min((b.0 + 1.0 - a.1).max(0.0));
        d.min(wrap)
    } else {
        d
    }
}

fn piece_distance(a: &Piece, b: &Piece, circular: bool) -> f64 {
    let range = |p: &Piece| match *p {
        Piece::Slab { z_min, z_max, tau_min, tau_max, .. } => ((z_min, z_max), (tau_min, tau_max)),
        Piece::Cap { bound, below, .. } => ((-1.0, 1.0), if below { (f64::NEG_INFINITY, bound) } else { (bound, f64::INFINITY) }),
    };
    let (za, ta) = range(a);
    let (zb, tb) = range(b);
    let ds = band_distance(za, zb);
    let dt = interval_distance(ta, tb, circular);
    (ds * ds + dt * dt).sqrt()
}

pub fn three_chart_partition(input: &PartitionInput, grid_sphere: usize, grid_tau: usize) -> Result<PartitionReport> {
    let t = &input.subdivision;
    if t.len() < 3 || (t.len() - 1) % 2 != 0 {
        return Err(Error::Precondition(format!(
            "the construction needs an even number of intervals, got {}",
            t.len().saturating_sub(1)
        )));
    }
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition("subdivision breakpoints must increase".into()));
    }
    if !(input.eta > 0.0 && input.eta < 1.0) {
        return Err(Error::Precondition("eta must lie in (0, 1)".into()));
    }
    let circular = input.model == Model::S2xS1;
    if circular && ((t[0]).abs() > 1e-12 || (t[t.len() - 1] - 1.0).abs() > 1e-12) {
        return Err(Error::Precondition("on S^2 x S^1 the subdivision must run from 0 to 1".into()));
    }
    for (i, w) in t.windows(2).enumerate() {
        let inside = input.family.iter().any(|m| w[0] >= m.tau - m.margin - 1e-12 && w[1] <= m.tau + m.margin + 1e-12);
        if !inside {
            return Err(Error::Precondition(format!(
                "subdivision too coarse: J_{} = [{}, {}] lies in no tightness neighbourhood",
                i + 1,
                w[0],
                w[1]
            )));
        }
    }
    if input.model == Model::S3 && input.family.iter().any(|m| m.tau < t[0] - 1e-12 || m.tau > t[t.len() - 1] + 1e-12) {
        return Err(Error::Precondition("family curves meet the polar caps".into()));
    }
    let eta = input.eta;
    let slab = |disc: &'static str, z: (f64, f64), j: usize| Piece::Slab {
        disc,
        z_min: z.0,
        z_max: z.1,
        tau_min: t[j],
        tau_max: t[j + 1],
    };
    let (d, d_prime, d_plus, d_prime_minus) = ((0.0, 1.0), (-1.0, 0.0), (-eta, 1.0), (-1.0, -eta));
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    let mut c3 = Vec::new();
    for j in 0..t.len() - 1 {
        // j even <-> J_{j+1} odd
        if j % 2 == 0 {
            c1.push(slab("D+", d_plus, j));
            c3.push(slab("D'-", d_prime_minus, j));
        } else {
            c2.push(slab("D'", d_prime, j));
            c3.push(slab("D", d, j));
        }
    }
    if input.model == Model::S3 {
        c1.push(Piece::Cap { name: "B1", bound: t[t.len() - 1], below: false });
        c2.push(Piece::Cap { name: "B0", bound: t[0], below: true });
    }
    let charts: Vec<ChartRegion> = [c1, c2, c3]
        .into_iter()
        .enumerate()
        .map(|(i, comps)| {
            let mut margin = f64::INFINITY;
            for a in 0..comps.len() {
                for b in a + 1..comps.len() {
                    margin = margin.min(piece_distance(&comps[a], &comps[b], circular));
                }
            }
            ChartRegion { index: i + 1, components: comps, margin: margin.is_finite().then_some(margin) }
        })
        .collect();
    // product grid
    let pts = SphereSurface::default().fibonacci_points(grid_sphere.max(1));
    let (lo, hi) = if circular { (0.0, 1.0) } else { (t[0] - 0.25, t[t.len() - 1] + 0.25) };
    let mut covered = 0;
    let mut overlaps = 0;
    let mut total = 0;
    for i in 0..grid_tau.max(1) {
        let tau = lo + (hi - lo) * (i as f64 + 0.5) / grid_tau.max(1) as f64;
        for p in &pts {
            total += 1;
            let mut hit = false;
            for ch in &charts {
                let n = ch.components.iter().filter(|c| c.contains(p[2], tau)).count();
                hit |= n > 0;
                if n > 1 {
                    overlaps += 1;
                }
            }
            if hit {
                covered += 1;
            }
        }
    }
    let disjoint = overlaps == 0 && charts.iter().all(|c| c.margin.map_or(true, |m| m > 0.0));
    Ok(PartitionReport {
        model: input.model,
        eta,
        covers: covered == total,
        disjoint,
        charts,
        coverage: Coverage { grid_points: total, covered, overlaps },
    })
}
