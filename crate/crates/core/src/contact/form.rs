//! Differential 1-forms on R^N given by coefficient functions a(p), alpha = sum a_i dx_i.
//!
//! Coordinate layouts:
//! * standard / rotational on R^{2n+1}: (x_1..x_n, y_1..y_n, z)
//! * jet on R^{2n+1}: (u, Q_1..Q_n, P_1..P_n), alpha = du - sum P_i dQ_i
//! * sphere_restriction on R^{2n+2}: (x_1, y_1, .., x_{n+1}, y_{n+1}), alpha = sum x_j dy_j - y_j dx_j

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    Standard,
    Rotational,
    Jet,
    SphereRestriction,
    Custom,
}

impl FormKind {
    pub fn parse(s: &str) -> Result<FormKind> {
        match s {
            "standard" => Ok(FormKind::Standard),
            "rotational" => Ok(FormKind::Rotational),
            "jet" => Ok(FormKind::Jet),
            "sphere_restriction" => Ok(FormKind::SphereRestriction),
            "custom" => Ok(FormKind::Custom),
            other => Err(Error::InvalidArgument(format!("unknown form kind '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FormKind::Standard => "standard",
            FormKind::Rotational => "rotational",
            FormKind::Jet => "jet",
            FormKind::SphereRestriction => "sphere_restriction",
            FormKind::Custom => "custom",
        }
    }
}

type CoeffFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type CoeffJacFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

#[derive(Clone)]
enum Coeffs {
    Builtin,
    Polys(Vec<Poly>),
    Func { a: CoeffFn, jac: CoeffJacFn },
}

#[derive(Clone)]
pub struct OneForm {
    pub kind: FormKind,
    /// Half-dimension parameter n of the built-in forms (0 for custom forms).
    pub n: usize,
    pub dim: usize,
    pub label: String,
    coeffs: Coeffs,
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneForm({}, n={}, dim={})", self.label, self.n, self.dim)
    }
}

pub fn make_form(kind: FormKind, n: usize) -> Result<OneForm> {
    if n < 1 {
        return Err(Error::InvalidArgument("n < 1".into()));
    }
    let (dim, label) = match kind {
        FormKind::Standard => (2 * n + 1, "alpha_st"),
        FormKind::Rotational => (2 * n + 1, "alpha_rot"),
        FormKind::Jet => (2 * n + 1, "alpha_jet"),
        FormKind::SphereRestriction => (2 * n + 2, "alpha_0"),
        FormKind::Custom => {
            return Err(Error::InvalidArgument(
                "custom forms need coefficient data; use OneForm::custom_poly".into(),
            ))
        }
    };
    Ok(OneForm { kind, n, dim, label: label.into(), coeffs: Coeffs::Builtin })
}

impl OneForm {
    pub fn standard(n: usize) -> OneForm {
        make_form(FormKind::Standard, n).expect("n >= 1")
    }

    pub fn rotational(n: usize) -> OneForm {
        make_form(FormKind::Rotational, n).expect("n >= 1")
    }

    pub fn jet(n: usize) -> OneForm {
        make_form(FormKind::Jet, n).expect("n >= 1")
    }

    pub fn sphere_restriction(n: usize) -> OneForm {
        make_form(FormKind::SphereRestriction, n).expect("n >= 1")
    }

    pub fn custom_poly(label: &str, coeffs: Vec<Poly>) -> Result<OneForm> {
        let dim = coeffs.len();
        if dim == 0 || coeffs.iter().any(|p| p.nvars != dim || !p.is_well_formed()) {
            return Err(Error::Schema("custom form: coefficient polynomials malformed".into()));
        }
        Ok(OneForm { kind: FormKind::Custom, n: 0, dim, label: label.into(), coeffs: Coeffs::Polys(coeffs) })
    }

    pub fn custom_fn(
        label: &str,
        dim: usize,
        a: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        jac: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> OneForm {
        OneForm {
            kind: FormKind::Custom,
            n: 0,
            dim,
            label: label.into(),
            coeffs: Coeffs::Func { a: Arc::new(a), jac: Arc::new(jac) },
        }
    }

    /// Liouville form p.dq on R^{2m} with layout (q_1..q_m, p_1..p_m).
    pub fn liouville(m: usize) -> OneForm {
        let dim = 2 * m;
        let mut coeffs = vec![Poly::zero(dim); dim];
        for i in 0..m {
            coeffs[i] = Poly::var(dim, m + i);
        }
        let mut f = OneForm::custom_poly("p_dq", coeffs).expect("well formed");
        f.n = m;
        f
    }

    /// cos(r) dz + r sin(r) dphi on R^3 with r the cylindrical radius.
    pub fn overtwisted_model() -> OneForm {
        // r sin r dphi = (sin r / r)(x dy - y dx); sinc is smooth at r = 0.
        fn sinc(r: f64) -> (f64, f64) {
            // returns (sin r / r, d/dr (sin r / r) / r)
            if r < 1e-3 {
                let r2 = r * r;
                (1.0 - r2 / 6.0 + r2 * r2 / 120.0, -1.0 / 3.0 + r2 / 30.0)
            } else {
                let s = r.sin() / r;
                (s, (r.cos() - s) / (r * r))
            }
        }
        OneForm::custom_fn(
            "alpha_ot",
            3,
            |p| {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                let (s, _) = sinc(r);
                vec![-p[1] * s, p[0] * s, r.cos()]
            },
            |p| {
                let (x, y) = (p[0], p[1]);
                let r = (x * x + y * y).sqrt();
                let (s, ds) = sinc(r);
                // d(sinc)/dx = ds * x where ds = sinc'(r)/r
                let mut j = DMatrix::zeros(3, 3);
                j[(0, 0)] = -y * ds * x;
                j[(0, 1)] = -s - y * ds * y;
                j[(1, 0)] = s + x * ds * x;
                j[(1, 1)] = x * ds * y;
                // d cos r / dx = -sin r * x / r = -x * sinc
                j[(2, 0)] = -x * s;
                j[(2, 1)] = -y * s;
                j
            },
        )
    }

    /// Coefficient vector a(p).
    pub fn coeffs(&self, p: &[f64]) -> Vec<f64> {
        let n = self.n;
        match &self.coeffs {
            Coeffs::Polys(ps) => ps.iter().map(|q| q.eval(p)).collect(),
            Coeffs::Func { a, .. } => a(p),
            Coeffs::Builtin => {
                let mut a = vec![0.0; self.dim];
                match self.kind {
                    FormKind::Standard => {
                        for i in 0..n {
                            a[n + i] = p[i];
                        }
                        a[2 * n] = 1.0;
                    }
                    FormKind::Rotational => {
                        for i in 0..n {
                            a[i] = -p[n + i];
                            a[n + i] = p[i];
                        }
                        a[2 * n] = 1.0;
                    }
                    FormKind::Jet => {
                        a[0] = 1.0;
                        for i in 0..n {
                            a[1 + i] = -p[1 + n + i];
                        }
                    }
                    FormKind::SphereRestriction => {
                        for j in 0..=n {
                            a[2 * j] = -p[2 * j + 1];
                            a[2 * j + 1] = p[2 * j];
                        }
                    }
                    FormKind::Custom => unreachable!("custom forms carry coefficients"),
                }
                a
            }
        }
    }

    /// Jacobian J_{ij} = d a_i / d x_j.
    pub fn coeff_jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let mut j = DMatrix::zeros(self.dim, self.dim);
        match &self.coeffs {
            Coeffs::Polys(ps) => {
                for (i, q) in ps.iter().enumerate() {
                    let g = q.gradient(p);
                    for (k, v) in g.into_iter().enumerate() {
                        j[(i, k)] = v;
                    }
                }
            }
            Coeffs::Func { jac, .. } => j = jac(p),
            Coeffs::Builtin => match self.kind {
                FormKind::Standard => {
                    for i in 0..n {
                        j[(n + i, i)] = 1.0;
                    }
                }
                FormKind::Rotational => {
                    for i in 0..n {
                        j[(i, n + i)] = -1.0;
                        j[(n + i, i)] = 1.0;
                    }
                }
                FormKind::Jet => {
                    for i in 0..n {
                        j[(1 + i, 1 + n + i)] = -1.0;
                    }
                }
                FormKind::SphereRestriction => {
                    for k in 0..=n {
                        j[(2 * k, 2 * k + 1)] = -1.0;
                        j[(2 * k + 1, 2 * k)] = 1.0;
                    }
                }
                FormKind::Custom => unreachable!("custom forms carry coefficients"),
            },
        }
        j
    }

    pub fn eval(&self, p: &[f64], v: &[f64]) -> f64 {
        self.coeffs(p).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Matrix W with d(alpha)(u, v) = v^T W u, i.e. W = J - J^T.
    pub fn d_matrix(&self, p: &[f64]) -> DMatrix<f64> {
        let j = self.coeff_jacobian(p);
        &j - j.transpose()
    }

    pub fn d_eval(&self, p: &[f64], u: &[f64], v: &[f64]) -> f64 {
        let w = self.d_matrix(p);
        let mut acc = 0.0;
        for i in 0..self.dim {
            for k in 0..self.dim {
                acc += v[i] * w[(i, k)] * u[k];
            }
        }
        acc
    }

    /// alpha wedge (d alpha)^n evaluated on the standard basis (the contact volume density).
    /// Only meaningful for odd dimension; computed via the Pfaffian-free formula
    /// det of the bordered matrix [[0, a^T], [-a, W]] = (contact density)^2.
    pub fn contact_density_sq(&self, p: &[f64]) -> f64 {
        let a = self.coeffs(p);
        let w = self.d_matrix(p);
        let n = self.dim;
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            m[(0, i + 1)] = a[i];
            m[(i + 1, 0)] = -a[i];
            for k in 0..n {
                m[(i + 1, k + 1)] = w[(i, k)];
            }
        }
        m.determinant()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_examples() {
        let f = make_form(FormKind::Standard, 1).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]), 1.0);
        assert_eq!(f.eval(&[2.0, 5.0, 7.0], &[1.0, 3.0, 1.0]), 1.0 + 2.0 * 3.0);
        assert!(make_form(FormKind::Standard, 0).is_err());
        assert!(FormKind::parse("bogus").is_err());
    }

    #[test]
    fn rotational_example() {
        let f = make_form(FormKind::Rotational, 1).unwrap();
        assert_eq!(f.eval(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), 1.0);
        assert_eq!(f.eval(&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]), -1.0);
    }

    #[test]
    fn d_alpha_standard_is_dx_dy() {
        let f = OneForm::standard(2);
        let p = [0.3, -0.2, 1.0, 0.5, 0.1];
        let e = |i: usize| {
            let mut v = vec![0.0; 5];
            v[i] = 1.0;
            v
        };
        assert_eq!(f.d_eval(&p, &e(0), &e(2)), 1.0);
        assert_eq!(f.d_eval(&p, &e(2), &e(0)), -1.0);
        assert_eq!(f.d_eval(&p, &e(1), &e(3)), 1.0);
        assert_eq!(f.d_eval(&p, &e(0), &e(3)), 0.0);
    }

    #[test]
    fn overtwisted_jacobian_matches_finite_differences() {
        let f = OneForm::overtwisted_model();
        for p in [[0.7, -0.4, 0.2], [1e-4, 2e-4, 0.0], [2.5, 1.0, -1.0]] {
            let j = f.coeff_jacobian(&p);
            for k in 0..3 {
                let h = 1e-6;
                let mut pp = p;
                let mut pm = p;
                pp[k] += h;
                pm[k] -= h;
                let ap = f.coeffs(&pp);
                let am = f.coeffs(&pm);
                for i in 0..3 {
                    let fd = (ap[i] - am[i]) / (2.0 * h);
                    assert!((fd - j[(i, k)]).abs() < 1e-7, "{p:?} {i} {k}");
                }
            }
        }
    }

    #[test]
    fn contact_forms_are_nondegenerate() {
        for f in [OneForm::standard(1), OneForm::rotational(2), OneForm::jet(1), OneForm::overtwisted_model()] {
            let p = vec![0.3; f.dim];
            assert!(f.contact_density_sq(&p) > 0.0, "{f:?}");
        }
    }
}
