//! Contact star-shaped domains: sampled certificates that a field sweeps a bounded domain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cuboid::Cuboid;
use super::field::{dot, flow, norm, VectorField};
use crate::error::{Error, Result};
use crate::ode::OdeOptions;
use crate::poly::Poly;

/// A bounded domain U = {F < 0}.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    Ball { center: Vec<f64>, radius: f64 },
    Shell { center: Vec<f64>, inner: f64, outer: f64 },
    Cuboid { cuboid: Cuboid },
    /// Sublevel set of a polynomial, with a bounding box supplied by the caller.
    Level { f: Poly, lo: Vec<f64>, hi: Vec<f64> },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball { center, .. } | Domain::Shell { center, .. } => center.len(),
            Domain::Cuboid { cuboid } => cuboid.dim(),
            Domain::Level { f, .. } => f.nvars,
        }
    }

    pub fn f(&self, p: &[f64]) -> f64 {
        match self {
            Domain::Ball { center, radius } => dist2(p, center) - radius * radius,
            Domain::Shell { center, inner, outer } => {
                let r2 = dist2(p, center);
                (r2 - inner * inner) * (r2 - outer * outer)
            }
            Domain::Cuboid { cuboid } => {
                let (c, h) = (cuboid.center(), cuboid.half_edges());
                (0..c.len()).map(|k| (p[k] - c[k]).abs() / h[k]).fold(f64::NEG_INFINITY, f64::max) - 1.0
            }
            Domain::Level { f, .. } => f.eval(p),
        }
    }

    pub fn grad(&self, p: &[f64]) -> Vec<f64> {
        match self {
            Domain::Ball { center, .. } => p.iter().zip(center).map(|(a, b)| 2.0 * (a - b)).collect(),
            Domain::Shell { center, inner, outer } => {
                let r2 = dist2(p, center);
                let g = 2.0 * r2 - inner * inner - outer * outer;
                p.iter().zip(center).map(|(a, b)| 2.0 * (a - b) * g).collect()
            }
            Domain::Cuboid { cuboid } => {
                let (c, h) = (cuboid.center(), cuboid.half_edges());
                let mut best = 0;
                for k in 1..c.len() {
                    if (p[k] - c[k]).abs() / h[k] > (p[best] - c[best]).abs() / h[best] {
                        best = k;
                    }
                }
                let mut g = vec![0.0; c.len()];
                g[best] = (p[best] - c[best]).signum() / h[best];
                g
            }
            Domain::Level { f, .. } => f.gradient(p),
        }
    }

    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Ball { center, radius: r } | Domain::Shell { center, outer: r, .. } => {
                (center.iter().map(|c| c - r).collect(), center.iter().map(|c| c + r).collect())
            }
            Domain::Cuboid { cuboid } => {
                let (c, h) = (cuboid.center(), cuboid.half_edges());
                (c.iter().zip(&h).map(|(a, b)| a - b).collect(), c.iter().zip(&h).map(|(a, b)| a + b).collect())
            }
            Domain::Level { lo, hi, .. } => (lo.clone(), hi.clone()),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.f(p) < 0.0
    }
}

fn dist2(p: &[f64], c: &[f64]) -> f64 {
    p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundarySample {
    pub point: Vec<f64>,
    /// dF(X) at the point.
    pub derivative: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarShapedCertificate {
    pub field: String,
    pub zero: Option<Vec<f64>>,
    pub bounded: bool,
    pub boundary_samples: Vec<BoundarySample>,
    pub min_margin: f64,
    pub multiple_crossings: usize,
    pub backward_converged: usize,
    pub forward_escaped: usize,
    pub pass: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct StarShapedOptions {
    pub samples: usize,
    pub seed: u64,
    /// Forward orbits must leave the ball of this radius around the zero; `None` means
    /// ten times the bounding-box diagonal.
    pub escape_radius: Option<f64>,
    pub max_time: f64,
}

impl Default for StarShapedOptions {
    fn default() -> Self {
        StarShapedOptions { samples: 64, seed: 0, escape_radius: None, max_time: 1e4 }
    }
}

/// Newton iteration for a zero of X inside U.
pub fn find_zero_in(domain: &Domain, x: &VectorField, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let (lo, hi) = domain.bbox();
    let dim = lo.len();
    let mut starts = vec![lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect::<Vec<f64>>()];
    for _ in 0..32 {
        starts.push((0..dim).map(|k| rng.gen_range(lo[k]..=hi[k])).collect());
    }
    for s in starts {
        let mut p = s;
        for _ in 0..60 {
            let v = x.eval(&p);
            if norm(&v) < 1e-12 {
                break;
            }
            let j = x.jacobian(&p);
            let Some(step) = j.lu().solve(&nalgebra::DVector::from_vec(v)) else { break };
            for k in 0..dim {
                p[k] -= step[k];
            }
            if p.iter().any(|c| !c.is_finite()) {
                break;
            }
        }
        if p.iter().all(|c| c.is_finite()) && norm(&x.eval(&p)) < 1e-10 && domain.contains(&p) {
            return Some(p);
        }
    }
    None
}

/// Checks (a) dF(X) > 0 at boundary samples, (b) backward orbits of boundary points stay in U
/// and converge to the zero of X, (c) forward orbits stay outside U and escape.
pub fn star_shaped_report(domain: &Domain, x: &VectorField, opts: &StarShapedOptions) -> Result<StarShapedCertificate> {
    let dim = domain.dim();
    if x.dim != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x.dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut diagnostics = Vec::new();
    let (lo, hi) = domain.bbox();
    let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let half: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.75 * (b - a)).collect();
    let diag = norm(&lo.iter().zip(&hi).map(|(a, b)| b - a).collect::<Vec<_>>());

    // boundedness: F > 0 on the surface of an enlarged box
    let mut bounded = true;
    for _ in 0..256 {
        let face = rng.gen_range(0..dim);
        let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p: Vec<f64> =
            (0..dim).map(|k| mid[k] + if k == face { side * half[k] } else { rng.gen_range(-half[k]..=half[k]) }).collect();
        if domain.f(&p) <= 0.0 {
            bounded = false;
        }
    }
    if !bounded {
        diagnostics.push("domain meets the enlarged bounding box".into());
    }

    let zero = find_zero_in(domain, x, &mut rng);
    let mut cert = StarShapedCertificate {
        field: x.name.clone(),
        zero: zero.clone(),
        bounded,
        boundary_samples: Vec::new(),
        min_margin: f64::NEG_INFINITY,
        multiple_crossings: 0,
        backward_converged: 0,
        forward_escaped: 0,
        pass: false,
        diagnostics: Vec::new(),
    };
    let Some(z0) = zero else {
        diagnostics.push("no zero of the field found in U".into());
        cert.diagnostics = diagnostics;
        return Ok(cert);
    };

    let reach = 2.0 * diag + norm(&z0.iter().zip(&mid).map(|(a, b)| a - b).collect::<Vec<_>>());
    let escape = opts.escape_radius.unwrap_or(10.0 * diag);
    let ode = OdeOptions::default();
    let mut min_margin = f64::INFINITY;
    for _ in 0..opts.samples {
        let u = random_unit(&mut rng, dim);
        let at = |r: f64| -> Vec<f64> { z0.iter().zip(&u).map(|(a, b)| a + r * b).collect() };
        let steps = 400;
        let mut crossings = 0;
        let mut bracket = None;
        let mut prev = domain.f(&z0);
        for i in 1..=steps {
            let r = reach * i as f64 / steps as f64;
            let v = domain.f(&at(r));
            if (prev < 0.0) != (v < 0.0) {
                crossings += 1;
                if bracket.is_none() {
                    bracket = Some((reach * (i - 1) as f64 / steps as f64, r));
                }
            }
            prev = v;
        }
        if crossings > 1 {
            cert.multiple_crossings += 1;
        }
        let Some((mut a, mut b)) = bracket else {
            diagnostics.push("ray from the zero never leaves U".into());
            continue;
        };
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if domain.f(&at(m)) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let bp = at(0.5 * (a + b));
        let xv = x.eval(&bp);
        let der = dot(&domain.grad(&bp), &xv);
        min_margin = min_margin.min(der);

        // backward orbit stays in U and tends to the zero
        let mut p = bp.clone();
        let mut t = 0.0;
        let mut ok = true;
        let mut first = true;
        while t < opts.max_time {
            match flow(x, &p, -0.5, &ode) {
                Ok(q) => p = q,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
            t += 0.5;
            if !domain.contains(&p) && !first {
                ok = false;
                break;
            }
            first = false;
            if dist2(&p, &z0).sqrt() < 1e-3 * diag {
                break;
            }
        }
        if ok && dist2(&p, &z0).sqrt() < 1e-3 * diag {
            cert.backward_converged += 1;
        }

        // forward orbit stays outside U and escapes
        let mut p = bp.clone();
        let mut t = 0.0;
        let mut ok = true;
        let mut first = true;
        while t < opts.max_time {
            match flow(x, &p, 0.5, &ode) {
                Ok(q) => p = q,
                Err(_) => {
                    ok = false;
                    break;
                }
            }
            t += 0.5;
            if domain.contains(&p) && !first {
                ok = false;
                break;
            }
            first = false;
            if dist2(&p, &z0).sqrt() > escape {
                break;
            }
        }
        if ok && dist2(&p, &z0).sqrt() > escape {
            cert.forward_escaped += 1;
        }
        cert.boundary_samples.push(BoundarySample { point: bp, derivative: der });
    }
    let n = cert.boundary_samples.len();
    cert.min_margin = if n > 0 { min_margin } else { f64::NEG_INFINITY };
    if cert.multiple_crossings > 0 {
        diagnostics.push(format!("{} rays cross the boundary more than once", cert.multiple_crossings));
    }
    if cert.min_margin <= 0.0 {
        diagnostics.push("field is not outward transverse at some boundary sample".into());
    }
    cert.pass = bounded
        && n == opts.samples
        && n > 0
        && cert.min_margin > 0.0
        && cert.multiple_crossings == 0
        && cert.backward_converged == n
        && cert.forward_escaped == n;
    cert.diagnostics = diagnostics;
    Ok(cert)
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 0.1 && n <= 1.0 {
            return v.iter().map(|c| c / n).collect();
        }
    }
}
