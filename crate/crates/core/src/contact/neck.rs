//! The involution of R^{2n+1} \ {0} exchanging the dilation layers S_t and S_{-t}.
//!
//! S_t = delta^t(S_0) with S_0 the unit sphere. The sphere map rho acts on S_0; the default
//! sends each complex coordinate w_i = x_i + i y_i to conj(w_i) e^{-2iz}, i.e.
//! (r, phi, z) -> (r, -phi - 2z, z).

use nalgebra::{DMatrix, DVector};

use super::maps::SmoothMap;
use crate::error::{Error, Result};

/// Layer time t with p in S_t: e^{-2t} A + e^{-4t} z^2 = 1, A = |x|^2 + |y|^2.
pub fn layer_time(p: &[f64]) -> Result<f64> {
    let dim = p.len();
    if dim % 2 == 0 {
        return Err(Error::DimensionMismatch { expected: dim + 1, got: dim });
    }
    let z = p[dim - 1];
    let a: f64 = p[..dim - 1].iter().map(|v| v * v).sum();
    if a == 0.0 && z == 0.0 {
        return Err(Error::InvalidArgument("layer time undefined at the origin".into()));
    }
    // u = e^{-2t} is the positive root of z^2 u^2 + A u - 1 = 0
    let u = 2.0 / (a + (a * a + 4.0 * z * z).sqrt());
    Ok(-0.5 * u.ln())
}

fn dil(p: &[f64], t: f64) -> Vec<f64> {
    let m = p.len() - 1;
    p.iter()
        .enumerate()
        .map(|(i, v)| if i == m { v * (2.0 * t).exp() } else { v * t.exp() })
        .collect()
}

/// Default sphere map rho in the layout (x_1..x_n, y_1..y_n, z).
pub fn default_rho(n: usize) -> SmoothMap {
    let dim = 2 * n + 1;
    SmoothMap::new("rho", dim, dim, move |s| {
        let z = s[2 * n];
        let (c, sn) = ((2.0 * z).cos(), (2.0 * z).sin());
        let mut out = vec![0.0; dim];
        for i in 0..n {
            let (x, y) = (s[i], s[n + i]);
            out[i] = x * c - y * sn;
            out[n + i] = -x * sn - y * c;
        }
        out[2 * n] = z;
        Ok(out)
    })
    .with_jacobian(move |s| {
        let z = s[2 * n];
        let (c, sn) = ((2.0 * z).cos(), (2.0 * z).sin());
        let mut j = DMatrix::zeros(dim, dim);
        for i in 0..n {
            let (x, y) = (s[i], s[n + i]);
            let xp = x * c - y * sn;
            let yp = -x * sn - y * c;
            j[(i, i)] = c;
            j[(i, n + i)] = -sn;
            j[(i, 2 * n)] = 2.0 * yp;
            j[(n + i, i)] = -sn;
            j[(n + i, n + i)] = -c;
            j[(n + i, 2 * n)] = -2.0 * xp;
        }
        j[(2 * n, 2 * n)] = 1.0;
        Ok(j)
    })
}

/// Psi(p) = delta^{-t}(rho(delta^{-t}(p))) with t the layer time of p.
pub fn neck_involution(p: &[f64], rho: Option<&SmoothMap>) -> Result<Vec<f64>> {
    let t = layer_time(p)?;
    let s = dil(p, -t);
    let r = match rho {
        Some(r) => r.eval(&s)?,
        None => default_rho((p.len() - 1) / 2).eval(&s)?,
    };
    Ok(dil(&r, -t))
}

/// Psi as a map with analytic Jacobian (rho's own Jacobian is used, analytic or not).
pub fn neck_involution_map(n: usize, rho: Option<SmoothMap>) -> SmoothMap {
    let dim = 2 * n + 1;
    let rho = rho.unwrap_or_else(|| default_rho(n));
    let r1 = rho.clone();
    let name = if rho.name == "rho" { "neck-involution".to_string() } else { format!("neck-involution[{}]", rho.name) };
    SmoothMap::new(&name, dim, dim, move |p| neck_involution(p, Some(&r1))).with_jacobian(move |p| {
        let t = layer_time(p)?;
        let (e2, e4) = ((-2.0 * t).exp(), (-4.0 * t).exp());
        let z = p[2 * n];
        let a: f64 = p[..2 * n].iter().map(|v| v * v).sum();
        // implicit differentiation of G(p, t) = e^{-2t} A + e^{-4t} z^2 - 1
        let gt = -2.0 * e2 * a - 4.0 * e4 * z * z;
        let grad_t = DVector::from_fn(dim, |k, _| {
            let gp = if k == 2 * n { 2.0 * e4 * z } else { 2.0 * e2 * p[k] };
            -gp / gt
        });
        let w = |k: usize| if k == 2 * n { 2.0 } else { 1.0 };
        let dm = DMatrix::from_fn(dim, dim, |i, k| if i == k { (-w(i) * t).exp() } else { 0.0 });
        let s = dil(p, -t);
        let ds = &dm - DMatrix::from_fn(dim, dim, |i, k| w(i) * s[i] * grad_t[k]);
        let rs = rho.eval(&s)?;
        let jr = rho.jacobian(&s)?;
        let out = dil(&rs, -t);
        Ok(&dm * jr * ds - DMatrix::from_fn(dim, dim, |i, k| w(i) * out[i] * grad_t[k]))
    })
}
