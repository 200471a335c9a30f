//! Reeb fields, the contact Hamiltonian correspondence and the contact-field check.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::field::{dot, flow_with_jacobian, ScalarField, VectorField};
use super::form::{FormKind, OneForm};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Least-squares solve of the stacked system [a^T; W] X = rhs.
fn solve_stacked(form: &OneForm, p: &[f64], top: f64, rest: &[f64]) -> Result<Vec<f64>> {
    let n = form.dim;
    let a = form.coeffs(p);
    let w = form.d_matrix(p);
    let m = DMatrix::from_fn(n + 1, n, |i, k| if i == 0 { a[k] } else { w[(i - 1, k)] });
    let mut rhs = DVector::zeros(n + 1);
    rhs[0] = top;
    for i in 0..n {
        rhs[i + 1] = rest[i];
    }
    let svd = m.svd(true, true);
    let x = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::Singular(format!("contact system at {p:?}: {e}")))?;
    Ok(x.iter().copied().collect())
}

/// Reeb vector at p by solving alpha(R) = 1, i_R d alpha = 0 (any form kind).
pub fn reeb_vector_at(form: &OneForm, p: &[f64]) -> Result<Vec<f64>> {
    let zeros = vec![0.0; form.dim];
    // i_R dalpha (e_k) = dalpha(R, e_k) = e_k^T W R, so the rows of W act on R.
    solve_stacked(form, p, 1.0, &zeros)
}

pub fn reeb_field(form: &OneForm) -> Result<VectorField> {
    match form.kind {
        FormKind::Standard | FormKind::Rotational => {
            let mut v = vec![0.0; form.dim];
            v[form.dim - 1] = 1.0;
            Ok(VectorField::constant("reeb", v))
        }
        k => Err(Error::UnsupportedKind(format!("reeb_field does not support {}", k.name()))),
    }
}

/// Contact vector field X_H with i_X alpha = H and i_X dalpha = (i_R dH) alpha - dH.
pub fn field_of_hamiltonian(h: &ScalarField, form: &OneForm) -> Result<VectorField> {
    if h.dim != form.dim {
        return Err(Error::DimensionMismatch { expected: form.dim, got: h.dim });
    }
    match form.kind {
        FormKind::Standard => {
            let n = form.n;
            if let Some(hp) = h.poly() {
                // symbolic closed form, so cancellations are exact
                let mut comps = vec![Poly::zero(form.dim); form.dim];
                let hz = hp.derivative(2 * n);
                let mut c = hp.clone();
                for i in 0..n {
                    let xi = Poly::var(form.dim, i);
                    comps[i] = xi.mul(&hz).add(&hp.derivative(n + i).scale(-1.0)).simplified();
                    comps[n + i] = hp.derivative(i).simplified();
                    c = c.add(&xi.mul(&hp.derivative(i)).scale(-1.0));
                }
                comps[2 * n] = c.simplified();
                return VectorField::from_polys(&format!("X_{}", h.name), comps);
            }
            let h = h.clone();
            Ok(VectorField::from_fn(&format!("X_{}", h.name), form.dim, move |p| {
                let g = h.gradient(p);
                let hz = g[2 * n];
                let mut x = vec![0.0; 2 * n + 1];
                let mut c = h.eval(p);
                for i in 0..n {
                    x[i] = p[i] * hz - g[n + i];
                    x[n + i] = g[i];
                    c -= p[i] * g[i];
                }
                x[2 * n] = c;
                x
            }))
        }
        FormKind::Rotational | FormKind::Custom => {
            let h = h.clone();
            let form = form.clone();
            Ok(VectorField::from_fn(&format!("X_{}", h.name), form.dim, move |p| {
                generic_hamiltonian_vector(&h, &form, p).unwrap_or_else(|_| vec![f64::NAN; form.dim])
            }))
        }
        k => Err(Error::UnsupportedKind(format!("field_of_hamiltonian does not support {}", k.name()))),
    }
}

/// Generic per-point solve of the defining identities.
pub fn generic_hamiltonian_vector(h: &ScalarField, form: &OneForm, p: &[f64]) -> Result<Vec<f64>> {
    let r = reeb_vector_at(form, p)?;
    let g = h.gradient(p);
    let a = form.coeffs(p);
    let rh = dot(&r, &g);
    // dalpha(X, e_k) = (W X)_k must equal rh * a_k - dH_k
    let rest: Vec<f64> = (0..form.dim).map(|k| rh * a[k] - g[k]).collect();
    solve_stacked(form, p, h.eval(p), &rest)
}

/// H_X = alpha(X), with analytic gradient (DX)^T a + J^T X.
pub fn hamiltonian_of_field(x: &VectorField, form: &OneForm) -> Result<ScalarField> {
    if x.dim != form.dim {
        return Err(Error::DimensionMismatch { expected: form.dim, got: x.dim });
    }
    let (x1, f1) = (x.clone(), form.clone());
    let (x2, f2) = (x.clone(), form.clone());
    Ok(ScalarField::from_fn(&format!("H_{}", x.name), form.dim, move |p| f1.eval(p, &x1.eval(p)))
        .with_gradient(move |p| {
            let a = f2.coeffs(p);
            let j = f2.coeff_jacobian(p);
            let v = x2.eval(p);
            let dx = x2.jacobian(p);
            (0..f2.dim)
                .map(|k| {
                    let mut s = 0.0;
                    for i in 0..f2.dim {
                        s += dx[(i, k)] * a[i] + j[(i, k)] * v[i];
                    }
                    s
                })
                .collect()
        }))
}

/// Residuals of the defining identities of X_H at p (max abs over the tangent basis).
pub fn defining_identity_residual(x: &[f64], h: &ScalarField, form: &OneForm, p: &[f64]) -> Result<f64> {
    let r = reeb_vector_at(form, p)?;
    let g = h.gradient(p);
    let a = form.coeffs(p);
    let w = form.d_matrix(p);
    let rh = dot(&r, &g);
    let mut res = (dot(&a, x) - h.eval(p)).abs();
    for k in 0..form.dim {
        let mut lhs = 0.0;
        for i in 0..form.dim {
            lhs += w[(k, i)] * x[i];
        }
        res = res.max((lhs - (rh * a[k] - g[k])).abs());
    }
    Ok(res)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContactFieldReport {
    pub is_contact: bool,
    pub samples: usize,
    pub conformal_factors: Vec<f64>,
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
    pub tol: f64,
}

/// Checks L_X alpha = lambda alpha at each sample using central differences of flow
/// pullbacks (time step 1e-4).
pub fn contact_field_report(x: &VectorField, form: &OneForm, samples: &[Vec<f64>], tol: f64) -> ContactFieldReport {
    let h = 1e-4;
    let n = form.dim;
    let mut lambdas = Vec::with_capacity(samples.len());
    let mut max_res = 0.0f64;
    let mut worst = None;
    for p in samples {
        let (qp, jp) = flow_with_jacobian(x, p, h, 4);
        let (qm, jm) = flow_with_jacobian(x, p, -h, 4);
        let ap = DVector::from_vec(form.coeffs(&qp));
        let am = DVector::from_vec(form.coeffs(&qm));
        let l = (jp.transpose() * ap - jm.transpose() * am) / (2.0 * h);
        let a0 = form.coeffs(p);
        let aa = dot(&a0, &a0);
        let lam = if aa > 0.0 { (0..n).map(|k| l[k] * a0[k]).sum::<f64>() / aa } else { 0.0 };
        let scale = aa.sqrt().max(1.0);
        let res = (0..n).map(|k| (l[k] - lam * a0[k]).abs()).fold(0.0, f64::max) / scale;
        let res = if res.is_finite() { res } else { f64::INFINITY };
        if worst.is_none() || res > max_res {
            max_res = res;
            worst = Some(p.clone());
        }
        lambdas.push(lam);
    }
    ContactFieldReport {
        is_contact: max_res <= tol,
        samples: samples.len(),
        conformal_factors: lambdas,
        max_residual: max_res,
        worst_point: if max_res > tol { worst } else { None },
        tol,
    }
}

/// The compactly supported contraction field X_{-f H_V} with f a C^2 cutoff equal to 1 on
/// the ball of radius r and 0 outside radius 2r.
pub fn cutoff_contraction_field(n: usize, r: f64) -> Result<VectorField> {
    use super::field::{smootherstep, smootherstep_deriv};
    let dim = 2 * n + 1;
    let h = ScalarField::from_fn("-fH_V", dim, move |p| {
        let rad = super::field::norm(p);
        let f = 1.0 - smootherstep((rad - r) / r);
        -f * hv(p, n)
    })
    .with_gradient(move |p| {
        let rad = super::field::norm(p);
        let f = 1.0 - smootherstep((rad - r) / r);
        let df = if rad > 0.0 { -smootherstep_deriv((rad - r) / r) / r } else { 0.0 };
        let hvv = hv(p, n);
        let mut g = vec![0.0; dim];
        for i in 0..n {
            g[i] = p[n + i];
            g[n + i] = p[i];
        }
        g[2 * n] = 2.0;
        (0..dim)
            .map(|k| {
                let dr = if rad > 0.0 { p[k] / rad } else { 0.0 };
                -(f * g[k] + hvv * df * dr)
            })
            .collect()
    });
    field_of_hamiltonian(&h, &OneForm::standard(n))
}

fn hv(p: &[f64], n: usize) -> f64 {
    let mut s = 2.0 * p[2 * n];
    for i in 0..n {
        s += p[i] * p[n + i];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Poly, Term};

    fn hv_poly() -> Poly {
        Poly {
            nvars: 3,
            terms: vec![Term { coef: 2.0, exps: vec![0, 0, 1] }, Term { coef: 1.0, exps: vec![1, 1, 0] }],
        }
    }

    #[test]
    fn dilation_from_hamiltonian() {
        let f = OneForm::standard(1);
        let x = field_of_hamiltonian(&ScalarField::from_poly("H_V", hv_poly()), &f).unwrap();
        let p = [0.3, -1.7, 2.5];
        assert_eq!(x.eval(&p), vec![0.3, -1.7, 5.0]);
    }

    #[test]
    fn hamiltonian_examples() {
        let f = OneForm::standard(1);
        let one = ScalarField::from_poly("1", Poly::constant(3, 1.0));
        assert_eq!(field_of_hamiltonian(&one, &f).unwrap().eval(&[0.4, 0.1, -2.0]), vec![0.0, 0.0, 1.0]);
        let h = Poly {
            nvars: 3,
            terms: vec![Term { coef: 3.0, exps: vec![0, 0, 1] }, Term { coef: 1.0, exps: vec![1, 1, 0] }],
        };
        let x = field_of_hamiltonian(&ScalarField::from_poly("H", h), &f).unwrap();
        let v = x.eval(&[1.0, 2.0, 3.0]);
        assert!((v[0] - 2.0).abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15 && (v[2] - 9.0).abs() < 1e-15);
    }

    #[test]
    fn reeb_fields() {
        let r = reeb_field(&OneForm::standard(2)).unwrap();
        assert_eq!(r.eval(&[1.0, 2.0, 3.0, 4.0, 5.0]), vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        let rot = OneForm::rotational(1);
        let g = reeb_vector_at(&rot, &[0.0, 0.0, 0.0]).unwrap();
        assert!(g[0].abs() < 1e-14 && g[1].abs() < 1e-14 && (g[2] - 1.0).abs() < 1e-14);
        assert!(matches!(reeb_field(&OneForm::jet(1)), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn generic_path_agrees_with_closed_form() {
        let f = OneForm::standard(1);
        let h = ScalarField::from_poly("H_V", hv_poly());
        for p in [[0.1, 0.2, 0.3], [-1.0, 0.5, 2.0]] {
            let g = generic_hamiltonian_vector(&h, &f, &p).unwrap();
            let c = field_of_hamiltonian(&h, &f).unwrap().eval(&p);
            for i in 0..3 {
                assert!((g[i] - c[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotational_hamiltonian_satisfies_identities() {
        let f = OneForm::rotational(1);
        let h = ScalarField::from_poly("z", Poly::var(3, 2));
        let x = field_of_hamiltonian(&h, &f).unwrap();
        let p = [0.3, -0.4, 0.8];
        let v = x.eval(&p);
        assert!(defining_identity_residual(&v, &h, &f, &p).unwrap() < 1e-12);
        assert!(field_of_hamiltonian(&h, &OneForm::jet(1)).is_err());
    }

    #[test]
    fn contact_field_examples() {
        let f = OneForm::standard(1);
        let pts: Vec<Vec<f64>> = vec![vec![0.5, -0.3, 0.2], vec![1.0, 1.0, -1.0], vec![-0.7, 0.1, 0.4]];
        let v = VectorField::dilation(1);
        let r = contact_field_report(&v, &f, &pts, 1e-6);
        assert!(r.is_contact);
        for l in r.conformal_factors {
            assert!((l - 2.0).abs() < 1e-6);
        }
        let hyp = VectorField::linear_diagonal("hyp", vec![1.0, -1.0, 0.0]);
        assert!(contact_field_report(&hyp, &f, &pts, 1e-6).is_contact);
        let euler = VectorField::linear_diagonal("euler", vec![1.0, 1.0, 1.0]);
        let r = contact_field_report(&euler, &f, &pts, 1e-6);
        assert!(!r.is_contact && r.worst_point.is_some());
    }
}
