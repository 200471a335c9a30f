//! Vector fields and scalar fields on R^N, flows.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::poly::Poly;

type VecFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type MatFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
type FlowFn = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;
type FlowJacFn = Arc<dyn Fn(&[f64], f64) -> DMatrix<f64> + Send + Sync>;
type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Clone)]
pub struct VectorField {
    pub dim: usize,
    pub name: String,
    /// Relative step for the finite-difference Jacobian fallback.
    pub fd_step: f64,
    eval: VecFn,
    jac: Option<MatFn>,
    flow: Option<FlowFn>,
    flow_jac: Option<FlowJacFn>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorField({}, dim={})", self.name, self.dim)
    }
}

impl VectorField {
    pub fn from_fn(name: &str, dim: usize, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        VectorField {
            dim,
            name: name.into(),
            fd_step: DEFAULT_FD_STEP,
            eval: Arc::new(f),
            jac: None,
            flow: None,
            flow_jac: None,
        }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.jac = Some(Arc::new(j));
        self
    }

    pub fn with_flow(
        mut self,
        flow: impl Fn(&[f64], f64) -> Vec<f64> + Send + Sync + 'static,
        flow_jac: impl Fn(&[f64], f64) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.flow = Some(Arc::new(flow));
        self.flow_jac = Some(Arc::new(flow_jac));
        self
    }

    pub fn from_polys(name: &str, comps: Vec<Poly>) -> Result<Self> {
        let dim = comps.len();
        if comps.iter().any(|p| p.nvars != dim || !p.is_well_formed()) {
            return Err(Error::Schema("vector field polynomials malformed".into()));
        }
        let comps = Arc::new(comps);
        let c2 = comps.clone();
        let derivs: Vec<Vec<Poly>> = comps.iter().map(|p| (0..dim).map(|k| p.derivative(k)).collect()).collect();
        Ok(VectorField::from_fn(name, dim, move |p| c2.iter().map(|q| q.eval(p)).collect()).with_jacobian(
            move |p| {
                let mut m = DMatrix::zeros(dim, dim);
                for i in 0..dim {
                    for k in 0..dim {
                        m[(i, k)] = derivs[i][k].eval(p);
                    }
                }
                m
            },
        ))
    }

    pub fn constant(name: &str, v: Vec<f64>) -> Self {
        let dim = v.len();
        let v1 = v.clone();
        let v2 = v.clone();
        VectorField::from_fn(name, dim, move |_| v1.clone())
            .with_jacobian(move |_| DMatrix::zeros(dim, dim))
            .with_flow(
                move |p, t| p.iter().zip(&v2).map(|(a, b)| a + t * b).collect(),
                move |_, _| DMatrix::identity(dim, dim),
            )
    }

    /// Linear diagonal field p -> (d_i p_i) with analytic flow.
    pub fn linear_diagonal(name: &str, diag: Vec<f64>) -> Self {
        let dim = diag.len();
        let d1 = diag.clone();
        let d2 = diag.clone();
        let d3 = diag.clone();
        let d4 = diag;
        VectorField::from_fn(name, dim, move |p| p.iter().zip(&d1).map(|(x, d)| x * d).collect())
            .with_jacobian(move |_| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d2.clone())))
            .with_flow(
                move |p, t| p.iter().zip(&d3).map(|(x, d)| x * (d * t).exp()).collect(),
                move |_, t| DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, d4.iter().map(|d| (d * t).exp()))),
            )
    }

    /// V = (x, y, 2z) on R^{2n+1}, generating the contact dilations.
    pub fn dilation(n: usize) -> Self {
        let mut d = vec![1.0; 2 * n + 1];
        d[2 * n] = 2.0;
        VectorField::linear_diagonal("dilation", d)
    }

    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        (self.eval)(p)
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jac.is_some()
    }

    pub fn has_analytic_flow(&self) -> bool {
        self.flow.is_some()
    }

    pub fn jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        match &self.jac {
            Some(j) => j(p),
            None => self.fd_jacobian(p),
        }
    }

    /// Central finite-difference Jacobian with step fd_step * (1 + |p|).
    pub fn fd_jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        let h = self.fd_step * (1.0 + norm(p));
        let mut m = DMatrix::zeros(self.dim, p.len());
        let mut q = p.to_vec();
        for k in 0..p.len() {
            q[k] = p[k] + h;
            let fp = self.eval(&q);
            q[k] = p[k] - h;
            let fm = self.eval(&q);
            q[k] = p[k];
            for i in 0..self.dim {
                m[(i, k)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        m
    }

    pub fn scaled(&self, c: f64) -> VectorField {
        let base = self.clone();
        let mut out = VectorField::from_fn(&format!("{}*{}", c, self.name), self.dim, move |p| {
            base.eval(p).into_iter().map(|v| c * v).collect()
        });
        if let Some(j) = self.jac.clone() {
            out = out.with_jacobian(move |p| j(p) * c);
        }
        if let (Some(f), Some(fj)) = (self.flow.clone(), self.flow_jac.clone()) {
            out = out.with_flow(move |p, t| f(p, c * t), move |p, t| fj(p, c * t));
        }
        out
    }
}

/// Scalar field with gradient (analytic or finite differences).
#[derive(Clone)]
pub struct ScalarField {
    pub dim: usize,
    pub name: String,
    f: ScalarFn,
    grad: Option<VecFn>,
    poly: Option<Poly>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField({}, dim={})", self.name, self.dim)
    }
}

impl ScalarField {
    pub fn from_fn(name: &str, dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField { dim, name: name.into(), f: Arc::new(f), grad: None, poly: None }
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn from_poly(name: &str, p: Poly) -> Self {
        let dim = p.nvars;
        let derivs: Vec<Poly> = (0..dim).map(|k| p.derivative(k)).collect();
        let kept = p.clone();
        let mut s = ScalarField::from_fn(name, dim, move |x| p.eval(x))
            .with_gradient(move |x| derivs.iter().map(|d| d.eval(x)).collect());
        s.poly = Some(kept);
        s
    }

    /// The polynomial this field was built from, if any.
    pub fn poly(&self) -> Option<&Poly> {
        self.poly.as_ref()
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        (self.f)(p)
    }

    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        match &self.grad {
            Some(g) => g(p),
            None => {
                let h = 1e-6 * (1.0 + norm(p));
                let mut q = p.to_vec();
                (0..p.len())
                    .map(|k| {
                        q[k] = p[k] + h;
                        let a = self.eval(&q);
                        q[k] = p[k] - h;
                        let b = self.eval(&q);
                        q[k] = p[k];
                        (a - b) / (2.0 * h)
                    })
                    .collect()
            }
        }
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Flow of X for signed time t. Uses the analytic flow when the field carries one.
pub fn flow(x: &VectorField, p: &[f64], t: f64, opts: &OdeOptions) -> Result<Vec<f64>> {
    if p.len() != x.dim {
        return Err(Error::DimensionMismatch { expected: x.dim, got: p.len() });
    }
    if let Some(f) = &x.flow {
        let out = f(p, t);
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration("NaN encountered".into()));
        }
        return Ok(out);
    }
    flow_numeric(x, p, t, opts)
}

/// Adaptive numerical flow, ignoring any analytic flow (for cross-checks).
pub fn flow_numeric(x: &VectorField, p: &[f64], t: f64, opts: &OdeOptions) -> Result<Vec<f64>> {
    if p.len() != x.dim {
        return Err(Error::DimensionMismatch { expected: x.dim, got: p.len() });
    }
    ode::integrate(
        |y, dy| {
            let v = x.eval(y);
            dy.copy_from_slice(&v);
        },
        p,
        t,
        opts,
    )
}

/// Flow map and its derivative D(phi^t)(p). Analytic when available, else RK4 on the
/// variational system with `steps` steps.
pub fn flow_with_jacobian(x: &VectorField, p: &[f64], t: f64, steps: usize) -> (Vec<f64>, DMatrix<f64>) {
    if let (Some(f), Some(fj)) = (&x.flow, &x.flow_jac) {
        return (f(p, t), fj(p, t));
    }
    let n = x.dim;
    let mut y0 = p.to_vec();
    for i in 0..n {
        for k in 0..n {
            y0.push(if i == k { 1.0 } else { 0.0 });
        }
    }
    let y = ode::rk4(
        |y, dy| {
            let v = x.eval(&y[..n]);
            dy[..n].copy_from_slice(&v);
            let j = x.jacobian(&y[..n]);
            // d/dt M = J M, M stored row-major after the state
            for i in 0..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += j[(i, l)] * y[n + l * n + k];
                    }
                    dy[n + i * n + k] = s;
                }
            }
        },
        &y0,
        t,
        steps,
    );
    let m = DMatrix::from_fn(n, n, |i, k| y[n + i * n + k]);
    (y[..n].to_vec(), m)
}

/// C^2 smoothstep: 0 for s <= 0, 1 for s >= 1, 6s^5 - 15s^4 + 10s^3 between.
pub fn smootherstep(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        s * s * s * (s * (6.0 * s - 15.0) + 10.0)
    }
}

pub fn smootherstep_deriv(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        30.0 * s * s * (s - 1.0) * (s - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilation_flow_examples() {
        let v = VectorField::dilation(1);
        let out = flow(&v, &[1.0, 0.0, 0.0], 2f64.ln(), &OdeOptions::default()).unwrap();
        assert!((out[0] - 2.0).abs() < 1e-14);
        let num = flow_numeric(&v, &[0.3, -0.2, 0.5], 1.5, &OdeOptions::default()).unwrap();
        let ana = flow(&v, &[0.3, -0.2, 0.5], 1.5, &OdeOptions::default()).unwrap();
        for i in 0..3 {
            assert!((num[i] - ana[i]).abs() < 1e-7 * (1.0 + ana[i].abs()));
        }
    }

    #[test]
    fn reeb_translation() {
        let r = VectorField::constant("reeb", vec![0.0, 0.0, 1.0]);
        let out = flow_numeric(&r, &[0.5, 0.25, -1.0], 2.5, &OdeOptions::default()).unwrap();
        assert!((out[2] - 1.5).abs() < 1e-12 && (out[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn variational_matches_analytic() {
        let v = VectorField::dilation(1);
        let numeric = VectorField::from_fn("v", 3, |p| vec![p[0], p[1], 2.0 * p[2]]);
        let (_, ja) = flow_with_jacobian(&v, &[0.1, 0.2, 0.3], 0.7, 10);
        let (_, jn) = flow_with_jacobian(&numeric, &[0.1, 0.2, 0.3], 0.7, 200);
        assert!((ja - jn).abs().max() < 1e-8);
    }

    #[test]
    fn smootherstep_is_c2() {
        assert_eq!(smootherstep(0.0), 0.0);
        assert_eq!(smootherstep(1.0), 1.0);
        assert!((smootherstep(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(smootherstep_deriv(0.0), 0.0);
        assert!((smootherstep_deriv(0.5) - 1.875).abs() < 1e-12);
    }
}
