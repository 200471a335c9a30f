//! Smooth maps between coordinate spaces and the model maps that get audited.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::field::norm;
use crate::error::{Error, Result};

type MapFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;
type MapJacFn = Arc<dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync>;

#[derive(Clone)]
pub struct SmoothMap {
    pub name: String,
    pub dim_in: usize,
    pub dim_out: usize,
    eval: MapFn,
    jac: Option<MapJacFn>,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothMap({}, {} -> {})", self.name, self.dim_in, self.dim_out)
    }
}

impl SmoothMap {
    pub fn new(
        name: &str,
        dim_in: usize,
        dim_out: usize,
        f: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        SmoothMap { name: name.into(), dim_in, dim_out, eval: Arc::new(f), jac: None }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'static) -> Self {
        self.jac = Some(Arc::new(j));
        self
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jac.is_some()
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.dim_in {
            return Err(Error::DimensionMismatch { expected: self.dim_in, got: p.len() });
        }
        (self.eval)(p)
    }

    pub fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        match &self.jac {
            Some(j) => j(p),
            None => self.fd_jacobian(p),
        }
    }

    /// Central differences with h = 1e-5 (1 + |p|).
    pub fn fd_jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let h = 1e-5 * (1.0 + norm(p));
        let mut m = DMatrix::zeros(self.dim_out, self.dim_in);
        let mut q = p.to_vec();
        for k in 0..self.dim_in {
            q[k] = p[k] + h;
            let a = self.eval(&q)?;
            q[k] = p[k] - h;
            let b = self.eval(&q)?;
            q[k] = p[k];
            for i in 0..self.dim_out {
                m[(i, k)] = (a[i] - b[i]) / (2.0 * h);
            }
        }
        Ok(m)
    }
}

pub fn identity_map(dim: usize) -> SmoothMap {
    SmoothMap::new("identity", dim, dim, |p| Ok(p.to_vec())).with_jacobian(move |_| Ok(DMatrix::identity(dim, dim)))
}

/// psi(x, y, z) = (x, y, 2z + x.y) on R^{2n+1}.
pub fn psi_normalizer(n: usize) -> SmoothMap {
    let dim = 2 * n + 1;
    SmoothMap::new("psi-normalizer", dim, dim, move |p| {
        let mut out = p.to_vec();
        let mut xy = 0.0;
        for i in 0..n {
            xy += p[i] * p[n + i];
        }
        out[2 * n] = 2.0 * p[2 * n] + xy;
        Ok(out)
    })
    .with_jacobian(move |p| {
        let mut j = DMatrix::identity(dim, dim);
        for i in 0..n {
            j[(2 * n, i)] = p[n + i];
            j[(2 * n, n + i)] = p[i];
        }
        j[(2 * n, 2 * n)] = 2.0;
        Ok(j)
    })
}

/// (u, Q, P) -> (z, x, y) = (u, -P, Q).
pub fn jet_to_standard(u: f64, q: &[f64], p: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    if q.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: q.len(), got: p.len() });
    }
    Ok((u, p.iter().map(|v| -v).collect(), q.to_vec()))
}

/// The same map on coordinates: jet layout (u, Q, P) to standard layout (x, y, z).
pub fn jet_to_standard_map(n: usize) -> SmoothMap {
    let dim = 2 * n + 1;
    SmoothMap::new("jet-standard", dim, dim, move |p| {
        let (z, x, y) = jet_to_standard(p[0], &p[1..1 + n], &p[1 + n..])?;
        let mut out = x;
        out.extend(y);
        out.push(z);
        Ok(out)
    })
    .with_jacobian(move |_| {
        let mut j = DMatrix::zeros(dim, dim);
        for i in 0..n {
            j[(i, 1 + n + i)] = -1.0;
            j[(n + i, 1 + i)] = 1.0;
        }
        j[(2 * n, 0)] = 1.0;
        Ok(j)
    })
}

pub const UNIT_TOL: f64 = 1e-10;

/// psi(q, p) = (<q,p>, p, q - <q,p> p) for |p| = 1; returns (u, Q, P).
pub fn sphere_jet_iso(q: &[f64], p: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    if q.len() != p.len() {
        return Err(Error::DimensionMismatch { expected: q.len(), got: p.len() });
    }
    let np = norm(p);
    if (np - 1.0).abs() > UNIT_TOL {
        return Err(Error::Precondition(format!("|p| = {np} is not 1")));
    }
    let qp: f64 = q.iter().zip(p).map(|(a, b)| a * b).sum();
    let big_p: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - qp * b).collect();
    Ok((qp, p.to_vec(), big_p))
}

/// Coordinate version: (q, p) in R^{2n} to jet layout (u, Q, P). The Jacobian is that of the
/// polynomial extension off the unit sphere.
pub fn sphere_jet_map(n: usize) -> SmoothMap {
    SmoothMap::new("sphere-jet", 2 * n, 2 * n + 1, move |x| {
        let (q, p) = (&x[..n], &x[n..]);
        let qp: f64 = q.iter().zip(p).map(|(a, b)| a * b).sum();
        let mut out = vec![qp];
        out.extend_from_slice(p);
        out.extend(q.iter().zip(p).map(|(a, b)| a - qp * b));
        Ok(out)
    })
    .with_jacobian(move |x| {
        let (q, p) = (&x[..n], &x[n..]);
        let qp: f64 = q.iter().zip(p).map(|(a, b)| a * b).sum();
        let mut j = DMatrix::zeros(2 * n + 1, 2 * n);
        for i in 0..n {
            j[(0, i)] = p[i];
            j[(0, n + i)] = q[i];
            j[(1 + i, n + i)] = 1.0;
        }
        // P_i = q_i - qp p_i
        for i in 0..n {
            for k in 0..n {
                let dq = if i == k { 1.0 } else { 0.0 } - p[k] * p[i];
                let dp = -q[k] * p[i] - if i == k { qp } else { 0.0 };
                j[(1 + n + i, k)] = dq;
                j[(1 + n + i, n + k)] = dp;
            }
        }
        Ok(j)
    })
}

/// (q, p) -> (beta(q), (D beta(q)^T)^{-1} p). beta must map R^m to R^m.
pub fn cotangent_lift(beta: &SmoothMap, q: &[f64], p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = beta.dim_in;
    if beta.dim_out != m || q.len() != m || p.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: q.len() });
    }
    let qq = beta.eval(q)?;
    let db = beta.jacobian(q)?;
    let lu = db.transpose().lu();
    if lu.determinant().abs() < 1e-14 {
        return Err(Error::Singular("d beta is singular".into()));
    }
    let pp = lu
        .solve(&DVector::from_column_slice(p))
        .ok_or_else(|| Error::Singular("d beta is singular".into()))?;
    Ok((qq, pp.iter().copied().collect()))
}

/// Coordinate version on R^{2m} with layout (q, p). The q' rows of the Jacobian use the
/// analytic D beta; the p' rows are finite differences.
pub fn cotangent_lift_map(beta: SmoothMap) -> SmoothMap {
    let m = beta.dim_in;
    let b1 = beta.clone();
    let b2 = beta;
    let base = SmoothMap::new("cotangent-lift", 2 * m, 2 * m, move |x| {
        let (q, p) = cotangent_lift(&b1, &x[..m], &x[m..])?;
        let mut out = q;
        out.extend(p);
        Ok(out)
    });
    let fd = base.clone();
    base.with_jacobian(move |x| {
        let mut j = fd.fd_jacobian(x)?;
        let db = b2.jacobian(&x[..m])?;
        for i in 0..m {
            for k in 0..2 * m {
                j[(i, k)] = if k < m { db[(i, k)] } else { 0.0 };
            }
        }
        Ok(j)
    })
}

/// delta^t(x, y, z) = (e^t x, e^t y, e^{2t} z).
pub fn dilation_map(n: usize, t: f64) -> SmoothMap {
    let dim = 2 * n + 1;
    let scale = move |i: usize| if i == 2 * n { (2.0 * t).exp() } else { t.exp() };
    SmoothMap::new("dilation", dim, dim, move |p| Ok(p.iter().enumerate().map(|(i, v)| v * scale(i)).collect()))
        .with_jacobian(move |_| Ok(DMatrix::from_fn(dim, dim, |i, k| if i == k { scale(i) } else { 0.0 })))
}

/// A near-identity polynomial diffeomorphism of R^m: q + eps * quadratic(q), with
/// coefficients given row-major as c[i][j][k] for the term q_j q_k in component i.
pub fn polynomial_near_identity(m: usize, eps: f64, coeffs: Vec<f64>) -> Result<SmoothMap> {
    if coeffs.len() != m * m * m {
        return Err(Error::DimensionMismatch { expected: m * m * m, got: coeffs.len() });
    }
    let c1 = Arc::new(coeffs);
    let c2 = c1.clone();
    Ok(SmoothMap::new("beta", m, m, move |q| {
        Ok((0..m)
            .map(|i| {
                let mut s = q[i];
                for j in 0..m {
                    for k in 0..m {
                        s += eps * c1[i * m * m + j * m + k] * q[j] * q[k];
                    }
                }
                s
            })
            .collect())
    })
    .with_jacobian(move |q| {
        Ok(DMatrix::from_fn(m, m, |i, l| {
            let mut s = if i == l { 1.0 } else { 0.0 };
            for j in 0..m {
                s += eps * (c2[i * m * m + j * m + l] + c2[i * m * m + l * m + j]) * q[j];
            }
            s
        }))
    }))
}
