//! Tangent vector fields on an embedded sphere.
//!
//! A field is stored through its values on the embedded sphere; chart representations are
//! obtained by pushing those values through the chart differentials. Characteristic fields
//! solve i_Y Omega = alpha|_S for the induced area form, which gives Y = a x n where a is the
//! coefficient vector of alpha and n the outward normal.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::sphere::{add, cross, dot, norm, scale, sub, Chart, SphereSurface, V3, BAND};
use crate::contact::{FormSpec, OneForm};
use crate::error::{Error, Result};
use crate::poly::Poly;

type EmbFn = Arc<dyn Fn(&V3) -> V3 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Characteristic { form: String },
    Synthetic { name: String },
}

#[derive(Clone)]
pub struct TangentField {
    pub sphere: SphereSurface,
    pub provenance: Provenance,
    f: EmbFn,
}

impl fmt::Debug for TangentField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TangentField({:?}, {:?})", self.provenance, self.sphere)
    }
}

/// Characteristic field of a 1-form on R^3 along the sphere.
pub fn characteristic_field(form: &OneForm, sphere: SphereSurface) -> Result<TangentField> {
    if form.dim != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: form.dim });
    }
    let form = form.clone();
    let label = form.label.clone();
    let s = sphere;
    Ok(TangentField {
        sphere,
        provenance: Provenance::Characteristic { form: label },
        f: Arc::new(move |p: &V3| {
            let a = form.coeffs(p);
            cross(&[a[0], a[1], a[2]], &s.normal(p))
        }),
    })
}

impl TangentField {
    /// Synthetic field given by an ambient map of the normalized position q = (p - c)/R;
    /// the tangential part is used.
    pub fn synthetic(name: &str, sphere: SphereSurface, g: impl Fn(&V3) -> V3 + Send + Sync + 'static) -> Self {
        let s = sphere;
        TangentField {
            sphere,
            provenance: Provenance::Synthetic { name: name.into() },
            f: Arc::new(move |p: &V3| g(&s.q(p))),
        }
    }

    pub fn from_polys(name: &str, sphere: SphereSurface, comps: Vec<Poly>) -> Result<Self> {
        if comps.len() != 3 || comps.iter().any(|c| c.nvars != 3 || !c.is_well_formed()) {
            return Err(Error::Schema("synthetic field needs three polynomials in (x, y, z)".into()));
        }
        Ok(TangentField::synthetic(name, sphere, move |q| {
            [comps[0].eval(q), comps[1].eval(q), comps[2].eval(q)]
        }))
    }

    /// Spherical gradient of a polynomial potential in normalized coordinates (negated on request).
    pub fn gradient(name: &str, sphere: SphereSurface, g: Poly, negate: bool) -> Result<Self> {
        if g.nvars != 3 || !g.is_well_formed() {
            return Err(Error::Schema("potential must be a polynomial in (x, y, z)".into()));
        }
        let d: Vec<Poly> = (0..3).map(|i| g.derivative(i)).collect();
        let sgn = if negate { -1.0 } else { 1.0 };
        Ok(TangentField::synthetic(name, sphere, move |q| {
            [sgn * d[0].eval(q), sgn * d[1].eval(q), sgn * d[2].eval(q)]
        }))
    }

    /// A field that agrees with `self` except where `patch` changes it. The patch receives
    /// the point on the sphere and the current value.
    pub fn patched(&self, name: &str, patch: impl Fn(&V3, V3) -> V3 + Send + Sync + 'static) -> TangentField {
        let inner = self.f.clone();
        TangentField {
            sphere: self.sphere,
            provenance: Provenance::Synthetic { name: name.into() },
            f: Arc::new(move |p: &V3| patch(p, inner(p))),
        }
    }

    pub fn is_characteristic(&self) -> bool {
        matches!(self.provenance, Provenance::Characteristic { .. })
    }

    pub fn name(&self) -> String {
        match &self.provenance {
            Provenance::Characteristic { form } => form.clone(),
            Provenance::Synthetic { name } => name.clone(),
        }
    }

    /// Value at the radial projection of p, tangent to the sphere there.
    pub fn eval(&self, p: &V3) -> V3 {
        let pp = self.sphere.project(p);
        self.sphere.tangent_part(&pp, &(self.f)(&pp))
    }

    pub fn chart_vector(&self, chart: Chart, u: &[f64; 2]) -> [f64; 2] {
        let p = self.sphere.from_chart(chart, u);
        self.sphere.vector_to_chart(chart, u, &self.eval(&p))
    }

    /// Central-difference Jacobian of the chart representation.
    pub fn chart_jacobian(&self, chart: Chart, u: &[f64; 2]) -> [[f64; 2]; 2] {
        let h = 1e-6 * (1.0 + u[0].abs().max(u[1].abs()));
        let mut j = [[0.0; 2]; 2];
        for k in 0..2 {
            let mut a = *u;
            let mut b = *u;
            a[k] += h;
            b[k] -= h;
            let ya = self.chart_vector(chart, &a);
            let yb = self.chart_vector(chart, &b);
            for i in 0..2 {
                j[i][k] = (ya[i] - yb[i]) / (2.0 * h);
            }
        }
        j
    }

    /// Second directional derivative of the chart representation along v.
    pub fn chart_second_derivative(&self, chart: Chart, u: &[f64; 2], v: &[f64; 2]) -> [f64; 2] {
        let h = 1e-4;
        let a = self.chart_vector(chart, &[u[0] + h * v[0], u[1] + h * v[1]]);
        let b = self.chart_vector(chart, u);
        let c = self.chart_vector(chart, &[u[0] - h * v[0], u[1] - h * v[1]]);
        [(a[0] - 2.0 * b[0] + c[0]) / (h * h), (a[1] - 2.0 * b[1] + c[1]) / (h * h)]
    }

    /// Divergence with respect to the induced area form, from central differences along an
    /// orthonormal tangent frame.
    pub fn divergence(&self, p: &V3) -> f64 {
        let s = &self.sphere;
        let pp = s.project(p);
        let (e1, e2) = s.tangent_basis(&pp);
        let h = 1e-5 * s.radius;
        let mut div = 0.0;
        for e in [e1, e2] {
            let a = self.eval(&add(&pp, &scale(&e, h)));
            let b = self.eval(&sub(&pp, &scale(&e, h)));
            div += dot(&e, &sub(&a, &b)) / (2.0 * h);
        }
        div
    }

    /// Largest relative disagreement between the two chart representations on overlap-band
    /// samples, measured through the transition Jacobian.
    pub fn transition_residual(&self, samples: usize) -> f64 {
        let s = &self.sphere;
        let mut worst = 0.0f64;
        for p in s.fibonacci_points(samples) {
            if s.q(&p)[2].abs() >= BAND {
                continue;
            }
            let u = s.to_chart(Chart::South, &p);
            let v = s.to_chart(Chart::North, &p);
            let ys = self.chart_vector(Chart::South, &u);
            let yn = self.chart_vector(Chart::North, &v);
            let j = SphereSurface::transition_jacobian(&u);
            let pushed = [j[0][0] * ys[0] + j[0][1] * ys[1], j[1][0] * ys[0] + j[1][1] * ys[1]];
            let diff = ((pushed[0] - yn[0]).powi(2) + (pushed[1] - yn[1]).powi(2)).sqrt();
            let scale = (yn[0] * yn[0] + yn[1] * yn[1]).sqrt().max(1e-300);
            if diff > 1e-300 {
                worst = worst.max(diff / scale);
            }
        }
        worst
    }

    /// Largest |Y| over a sample set, used to scale absolute tolerances.
    pub fn typical_speed(&self, samples: usize) -> f64 {
        self.sphere.fibonacci_points(samples).iter().map(|p| norm(&self.eval(p))).fold(0.0, f64::max)
    }
}

/// JSON description of a tangent field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TangentFieldSpec {
    Characteristic {
        form: FormSpec,
    },
    /// Tangential part of a polynomial ambient field in normalized coordinates.
    Polynomial {
        name: String,
        components: Vec<Poly>,
    },
    /// Spherical gradient of a polynomial potential in normalized coordinates.
    Gradient {
        name: String,
        potential: Poly,
        #[serde(default)]
        negate: bool,
    },
}

impl TangentFieldSpec {
    pub fn build(&self, sphere: SphereSurface) -> Result<TangentField> {
        match self {
            TangentFieldSpec::Characteristic { form } => characteristic_field(&form.build()?, sphere),
            TangentFieldSpec::Polynomial { name, components } => {
                TangentField::from_polys(name, sphere, components.clone())
            }
            TangentFieldSpec::Gradient { name, potential, negate } => {
                TangentField::gradient(name, sphere, potential.clone(), *negate)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_form_characteristic_field() {
        let s = SphereSurface::default();
        let y = characteristic_field(&OneForm::standard(1), s).unwrap();
        assert!(norm(&y.eval(&[0.0, 0.0, 1.0])) < 1e-15);
        assert!(norm(&y.eval(&[0.0, 0.0, -1.0])) < 1e-15);
        // i_Y Omega = alpha on tangent vectors
        for p in s.fibonacci_points(30) {
            let yv = y.eval(&p);
            let n = s.normal(&p);
            let (e1, e2) = s.tangent_basis(&p);
            for e in [e1, e2] {
                let lhs = dot(&n, &cross(&yv, &e));
                let rhs = OneForm::standard(1).eval(&p, &e);
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
        assert!(y.transition_residual(200) < 1e-8);
    }

    #[test]
    fn divergence_of_height_gradient() {
        // grad_S z = e_z - z n has divergence -2z on the unit sphere
        let s = SphereSurface::default();
        let y = TangentField::gradient("h", s, Poly::var(3, 2), false).unwrap();
        for p in s.fibonacci_points(20) {
            assert!((y.divergence(&p) + 2.0 * p[2]).abs() < 1e-7);
        }
    }

    #[test]
    fn spec_parses() {
        let j = r#"{"kind":"gradient","name":"h","potential":{"nvars":3,"terms":[{"coef":1.0,"exps":[0,0,1]}]}}"#;
        let spec: TangentFieldSpec = serde_json::from_str(j).unwrap();
        let y = spec.build(SphereSurface::default()).unwrap();
        assert!((y.eval(&[1.0, 0.0, 0.0])[2] - 1.0).abs() < 1e-15);
    }
}
