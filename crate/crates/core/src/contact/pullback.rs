//! Numerical pullback audits: phi^* alpha' against g alpha on tangent bases.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::{dot, norm};
use super::form::OneForm;
use super::maps::SmoothMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum Factor {
    Fixed(f64),
    Fit,
}

/// A base point with the tangent vectors on which forms are compared.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditSample {
    pub point: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
}

impl AuditSample {
    pub fn standard(point: Vec<f64>) -> Self {
        let n = point.len();
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        AuditSample { point, basis }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    pub index: usize,
    pub point: Vec<f64>,
    pub residual: f64,
    pub factor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleFailure {
    pub index: usize,
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PullbackReport {
    pub map: String,
    pub src_form: String,
    pub dst_form: String,
    pub factor: Factor,
    pub jacobian: String,
    pub sample_count: usize,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub max_kernel_angle_defect: f64,
    pub factor_min: f64,
    pub factor_max: f64,
    pub tol: f64,
    pub counterexample: Option<Counterexample>,
    pub failures: Vec<SampleFailure>,
    pub pass: bool,
}

/// Evaluate (phi^* alpha' - g alpha) on each sample's tangent basis.
pub fn pullback_report(
    map: &SmoothMap,
    src: &OneForm,
    dst: &OneForm,
    factor: Factor,
    samples: &[AuditSample],
    tol: f64,
) -> PullbackReport {
    let mut residuals = Vec::with_capacity(samples.len());
    let mut failures = Vec::new();
    let mut max_res = 0.0f64;
    let mut max_angle = 0.0f64;
    let mut worst: Option<Counterexample> = None;
    let mut fmin = f64::INFINITY;
    let mut fmax = f64::NEG_INFINITY;
    for (idx, s) in samples.iter().enumerate() {
        let out = match map.eval(&s.point) {
            Ok(v) => v,
            Err(e) => {
                failures.push(SampleFailure { index: idx, error: e.to_string() });
                continue;
            }
        };
        let j = match map.jacobian(&s.point) {
            Ok(j) => j,
            Err(e) => {
                failures.push(SampleFailure { index: idx, error: e.to_string() });
                continue;
            }
        };
        let a_dst = DVector::from_vec(dst.coeffs(&out));
        let a_src = src.coeffs(&s.point);
        let pulled = j.transpose() * a_dst;
        let pb: Vec<f64> = s.basis.iter().map(|v| dot(pulled.as_slice(), v)).collect();
        let al: Vec<f64> = s.basis.iter().map(|v| dot(&a_src, v)).collect();
        let g = match factor {
            Factor::Fixed(g) => g,
            Factor::Fit => {
                let aa = dot(&al, &al);
                if aa > 0.0 {
                    dot(&pb, &al) / aa
                } else {
                    0.0
                }
            }
        };
        let res = pb.iter().zip(&al).map(|(x, y)| (x - g * y).abs()).fold(0.0, f64::max);
        let res = if res.is_finite() { res } else { f64::INFINITY };
        let (npb, nal) = (norm(&pb), norm(&al));
        let angle = if npb > 0.0 && nal > 0.0 {
            (dot(&pb, &al).abs() / (npb * nal)).min(1.0).acos()
        } else if npb == 0.0 && nal == 0.0 {
            0.0
        } else {
            std::f64::consts::FRAC_PI_2
        };
        fmin = fmin.min(g);
        fmax = fmax.max(g);
        max_angle = max_angle.max(angle);
        if res > max_res || (idx == 0 && worst.is_none()) {
            max_res = max_res.max(res);
            if res > tol {
                worst = Some(Counterexample { index: idx, point: s.point.clone(), residual: res, factor: g });
            }
        }
        residuals.push(res);
    }
    let counterexample = if max_res > tol { worst } else { None };
    PullbackReport {
        map: map.name.clone(),
        src_form: src.label.clone(),
        dst_form: dst.label.clone(),
        factor,
        jacobian: if map.has_analytic_jacobian() { "analytic".into() } else { "finite_difference".into() },
        sample_count: samples.len(),
        residuals,
        max_residual: max_res,
        max_kernel_angle_defect: max_angle,
        factor_min: if fmin.is_finite() { fmin } else { 0.0 },
        factor_max: if fmax.is_finite() { fmax } else { 0.0 },
        tol,
        pass: max_res <= tol && failures.is_empty(),
        counterexample,
        failures,
    }
}

/// Uniform samples in [-r, r]^dim with the standard basis.
pub fn cube_samples(rng: &mut ChaCha8Rng, dim: usize, count: usize, r: f64) -> Vec<AuditSample> {
    (0..count)
        .map(|_| AuditSample::standard((0..dim).map(|_| rng.gen_range(-r..r)).collect()))
        .collect()
}

/// Samples on R^n x S^{n-1} (layout (q, p)) with tangent vectors e_i in q and an orthonormal
/// basis of p-perp in p.
pub fn cosphere_samples(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<AuditSample> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let np = norm(&p);
        if np < 0.1 {
            continue;
        }
        let p: Vec<f64> = p.iter().map(|v| v / np).collect();
        let mut basis = Vec::new();
        for i in 0..n {
            let mut e = vec![0.0; 2 * n];
            e[i] = 1.0;
            basis.push(e);
        }
        // Gram-Schmidt of e_1..e_n against p, keeping n-1 vectors
        let mut perp: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            let c = dot(&v, &p);
            for k in 0..n {
                v[k] -= c * p[k];
            }
            for w in &perp {
                let c = dot(&v, w);
                for k in 0..n {
                    v[k] -= c * w[k];
                }
            }
            let nv = norm(&v);
            if nv > 1e-6 && perp.len() < n - 1 {
                perp.push(v.iter().map(|x| x / nv).collect());
            }
        }
        for w in perp {
            let mut e = vec![0.0; 2 * n];
            e[n..].copy_from_slice(&w);
            basis.push(e);
        }
        let mut point = q;
        point.extend(p);
        out.push(AuditSample { point, basis });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::maps::{identity_map, psi_normalizer};
    use rand::SeedableRng;

    #[test]
    fn identity_audit_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = cube_samples(&mut rng, 3, 50, 2.0);
        let f = OneForm::standard(1);
        let r = pullback_report(&identity_map(3), &f, &f, Factor::Fixed(1.0), &s, 1e-14);
        assert!(r.pass && r.max_residual == 0.0 && r.counterexample.is_none());
    }

    #[test]
    fn wrong_factor_gives_counterexample() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = cube_samples(&mut rng, 3, 20, 1.0);
        let r = pullback_report(
            &psi_normalizer(1),
            &OneForm::standard(1),
            &OneForm::rotational(1),
            Factor::Fixed(1.0),
            &s,
            1e-9,
        );
        assert!(!r.pass);
        let c = r.counterexample.unwrap();
        assert!((c.residual - r.max_residual).abs() == 0.0);
        let fit = pullback_report(
            &psi_normalizer(1),
            &OneForm::standard(1),
            &OneForm::rotational(1),
            Factor::Fit,
            &s,
            1e-12,
        );
        assert!(fit.pass && (fit.factor_min - 2.0).abs() < 1e-12 && (fit.factor_max - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cosphere_basis_is_tangent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s in cosphere_samples(&mut rng, 3, 20) {
            assert_eq!(s.basis.len(), 5);
            let p = &s.point[3..];
            for v in &s.basis[3..] {
                assert!(dot(&v[3..], p).abs() < 1e-12);
            }
        }
    }
}
