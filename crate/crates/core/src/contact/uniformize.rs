//! The contactomorphism from a contact star-shaped domain U onto R^{2n+1}_st.
//!
//! Layers are U_t = phi_X^{t-1}(U), so U = U_1. With s_n = 1 - 2^{-n} and r_n = n the map is
//! phi_X^{r_1 - s_1} on U_{s_1} and Phi_{s_n, s_{n+1}}^{r_n, r_{n+1}} on U_{s_{n+1}} \ U_{s_n}, where
//! Phi_{a,b}^{c,d} = phi_X^{c-a} o (time d - b flow of X_F), F = g(T) H_X, T the layer time
//! and g a C^2 step from 0 to 1 across the middle third of [a, b].

use nalgebra::DMatrix;

use super::field::{dot, flow_with_jacobian, norm, smootherstep, smootherstep_deriv, ScalarField, VectorField};
use super::form::OneForm;
use super::hamiltonian::{field_of_hamiltonian, hamiltonian_of_field};
use super::maps::SmoothMap;
use super::starshaped::Domain;
use crate::error::{Error, Result};
use crate::ode;

const FLOW_STEPS: usize = 200;
const SURGERY_STEPS: usize = 40;

#[derive(Debug, Clone)]
pub struct Uniformizer {
    pub domain: Domain,
    pub field: VectorField,
    form: OneForm,
}

/// Flow map and Jacobian; fixed-step RK4 when no analytic flow exists so the result is smooth
/// in both the point and the time.
fn flow_fixed(x: &VectorField, p: &[f64], t: f64) -> (Vec<f64>, DMatrix<f64>) {
    flow_with_jacobian(x, p, t, FLOW_STEPS)
}

fn flow_point(x: &VectorField, p: &[f64], t: f64) -> Vec<f64> {
    if x.has_analytic_flow() {
        return flow_with_jacobian(x, p, t, 1).0;
    }
    ode::rk4(|y, dy| dy.copy_from_slice(&x.eval(y)), p, t, FLOW_STEPS)
}

pub fn s_seq(n: usize) -> f64 {
    1.0 - 0.5f64.powi(n as i32)
}

pub fn r_seq(n: usize) -> f64 {
    n as f64
}

impl Uniformizer {
    pub fn new(domain: Domain, field: VectorField) -> Result<Self> {
        let dim = domain.dim();
        if dim % 2 == 0 || field.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: field.dim });
        }
        Ok(Uniformizer { domain, field, form: OneForm::standard((dim - 1) / 2) })
    }

    /// sigma(u) with phi_X^sigma(u) on the boundary of U (positive inside U, negative outside).
    pub fn exit_time(&self, u: &[f64]) -> Result<f64> {
        let f = |s: f64| self.domain.f(&flow_point(&self.field, u, s));
        if norm(&self.field.eval(u)) == 0.0 {
            return Ok(if self.domain.contains(u) { f64::INFINITY } else { f64::NEG_INFINITY });
        }
        let (mut a, mut b) = (0.0, 0.0);
        let mut k = 0;
        if self.domain.f(u) < 0.0 {
            b = 0.5;
            while f(b) < 0.0 {
                a = b;
                b *= 2.0;
                k += 1;
                if k > 12 {
                    return Ok(f64::INFINITY);
                }
            }
        } else {
            a = -0.5;
            while f(a) >= 0.0 {
                b = a;
                a *= 2.0;
                k += 1;
                if k > 12 {
                    return Ok(f64::NEG_INFINITY);
                }
            }
        }
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if f(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        let mut s = 0.5 * (a + b);
        for _ in 0..4 {
            let q = flow_point(&self.field, u, s);
            let d = dot(&self.domain.grad(&q), &self.field.eval(&q));
            if d <= 0.0 {
                break;
            }
            let ns = s - self.domain.f(&q) / d;
            if !(ns >= a && ns <= b) {
                break;
            }
            s = ns;
        }
        Ok(s)
    }

    /// Layer time T(u) with u on the boundary of U_T; -inf at the zero of X.
    pub fn layer_time(&self, u: &[f64]) -> Result<f64> {
        Ok(1.0 - self.exit_time(u)?)
    }

    /// Gradient of the layer time: (D phi^sigma)^T grad F / (grad F . X) at the exit point.
    fn layer_time_grad(&self, u: &[f64], sigma: f64) -> Vec<f64> {
        let (q, j) = flow_fixed(&self.field, u, sigma);
        let g = self.domain.grad(&q);
        let den = dot(&g, &self.field.eval(&q));
        let v = j.transpose() * nalgebra::DVector::from_vec(g);
        v.iter().map(|c| c / den).collect()
    }

    /// The field X_F of Lemma-type surgery between layers a < b.
    fn surgery_field(&self, a: f64, b: f64) -> Result<VectorField> {
        let q1 = a + (b - a) / 3.0;
        let q2 = a + 2.0 * (b - a) / 3.0;
        let w = q2 - q1;
        let hx = hamiltonian_of_field(&self.field, &self.form)?;
        let (me1, me2) = (self.clone(), self.clone());
        let (h1, h2) = (hx.clone(), hx);
        let gfun = move |u: &[f64], me: &Uniformizer| -> (f64, f64, f64) {
            match me.exit_time(u) {
                Ok(s) if s.is_finite() => ((1.0 - s - q1) / w, s, 1.0),
                Ok(s) if s < 0.0 => (f64::INFINITY, s, 0.0),
                _ => (f64::NEG_INFINITY, f64::INFINITY, 0.0),
            }
        };
        let gf = gfun.clone();
        let h = ScalarField::from_fn("F", self.form.dim, move |u| {
            let (r, _, _) = gf(u, &me1);
            smootherstep(r) * h1.eval(u)
        })
        .with_gradient(move |u| {
            let (r, s, ok) = gfun(u, &me2);
            let g = smootherstep(r);
            let mut grad: Vec<f64> = h2.gradient(u).iter().map(|v| g * v).collect();
            let dg = smootherstep_deriv(r) / w;
            if dg != 0.0 && ok > 0.0 {
                let hv = h2.eval(u);
                let gt = me2.layer_time_grad(u, s);
                for k in 0..grad.len() {
                    grad[k] += dg * hv * gt[k];
                }
            }
            grad
        });
        field_of_hamiltonian(&h, &self.form)
    }

    /// Phi_{a,b}^{c,d}(u).
    pub fn phi_abcd(&self, a: f64, b: f64, c: f64, d: f64, u: &[f64]) -> Result<Vec<f64>> {
        if !(a < b && c < d) {
            return Err(Error::InvalidArgument("need a < b and c < d".into()));
        }
        let dp = d - c + a;
        // X_F must vanish near the boundary of U_a and equal X near U_b; needs q2 < min(b, d').
        let top = b.min(dp);
        let xf = self.surgery_field(a, top)?;
        let v = ode::rk4(|y, dy| dy.copy_from_slice(&xf.eval(y)), u, dp - b, SURGERY_STEPS);
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::Integration("surgery flow produced NaN".into()));
        }
        Ok(flow_point(&self.field, &v, c - a))
    }

    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.domain.dim() {
            return Err(Error::DimensionMismatch { expected: self.domain.dim(), got: u.len() });
        }
        if !self.domain.contains(u) {
            return Err(Error::InvalidArgument("point is not in U".into()));
        }
        let t = self.layer_time(u)?;
        if t <= s_seq(1) {
            return Ok(flow_point(&self.field, u, r_seq(1) - s_seq(1)));
        }
        let n = ((-(1.0 - t).log2()).floor() as usize).max(1);
        // guard against rounding at the layer boundaries
        let n = if t <= s_seq(n) { n - 1 } else if t > s_seq(n + 1) { n + 1 } else { n };
        let n = n.max(1);
        self.phi_abcd(s_seq(n), s_seq(n + 1), r_seq(n), r_seq(n + 1), u)
    }

    pub fn as_map(&self) -> SmoothMap {
        let me = self.clone();
        let dim = self.domain.dim();
        SmoothMap::new("starshaped-uniformization", dim, dim, move |u| me.apply(u))
    }
}

pub fn starshaped_uniformization(domain: &Domain, x: &VectorField, u: &[f64]) -> Result<Vec<f64>> {
    Uniformizer::new(domain.clone(), x.clone())?.apply(u)
}
