//! Named pullback audits of the model maps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::form::OneForm;
use super::maps::{
    cotangent_lift_map, dilation_map, jet_to_standard_map, polynomial_near_identity, psi_normalizer, sphere_jet_map,
};
use super::neck::{layer_time, neck_involution_map};
use super::pullback::{cosphere_samples, cube_samples, pullback_report, AuditSample, Factor, PullbackReport};
use crate::error::{Error, Result};

pub const AUDIT_NAMES: [&str; 6] =
    ["psi-normalizer", "neck-involution", "jet-standard", "sphere-jet", "cotangent-lift", "dilation"];

/// Extra checks recorded for the neck involution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NeckChecks {
    /// max |t(Psi(p)) + t(p)| over the samples.
    pub layer_identity_max: f64,
    pub layer_identity_pass: bool,
    /// Pullback audit restricted to samples with z = 0.
    pub equator: PullbackReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditResult {
    pub audit: String,
    pub report: PullbackReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neck: Option<NeckChecks>,
}

impl AuditResult {
    pub fn pass(&self) -> bool {
        self.report.pass
    }
}

fn neck_samples(rng: &mut ChaCha8Rng, count: usize, equator: bool) -> Vec<AuditSample> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut p: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        if equator {
            p[2] = 0.0;
        }
        if p.iter().map(|v| v * v).sum::<f64>().sqrt() > 0.2 {
            out.push(AuditSample::standard(p));
        }
    }
    out
}

/// Runs the named audit with `samples` seeded sample points.
pub fn run_audit(name: &str, samples: usize, tol: f64, seed: u64) -> Result<AuditResult> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (report, neck) = match name {
        "psi-normalizer" => {
            let s = cube_samples(&mut rng, 3, samples, 2.0);
            let r = pullback_report(
                &psi_normalizer(1),
                &OneForm::standard(1),
                &OneForm::rotational(1),
                Factor::Fixed(2.0),
                &s,
                tol,
            );
            (r, None)
        }
        "jet-standard" => {
            let s = cube_samples(&mut rng, 5, samples, 2.0);
            let r = pullback_report(
                &jet_to_standard_map(2),
                &OneForm::jet(2),
                &OneForm::standard(2),
                Factor::Fixed(1.0),
                &s,
                tol,
            );
            (r, None)
        }
        "sphere-jet" => {
            let s = cosphere_samples(&mut rng, 3, samples);
            let r =
                pullback_report(&sphere_jet_map(3), &OneForm::liouville(3), &OneForm::jet(3), Factor::Fixed(1.0), &s, tol);
            (r, None)
        }
        "cotangent-lift" => {
            let m = 2;
            let coeffs: Vec<f64> = (0..m * m * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let beta = polynomial_near_identity(m, 0.2, coeffs)?;
            let s = cube_samples(&mut rng, 2 * m, samples, 1.0);
            let r = pullback_report(
                &cotangent_lift_map(beta),
                &OneForm::liouville(m),
                &OneForm::liouville(m),
                Factor::Fixed(1.0),
                &s,
                tol,
            );
            (r, None)
        }
        "dilation" => {
            let t = 0.7;
            let s = cube_samples(&mut rng, 3, samples, 2.0);
            let r = pullback_report(
                &dilation_map(1, t),
                &OneForm::standard(1),
                &OneForm::standard(1),
                Factor::Fixed((2.0 * t).exp()),
                &s,
                tol,
            );
            (r, None)
        }
        "neck-involution" => {
            let map = neck_involution_map(1, None);
            let rot = OneForm::rotational(1);
            let s = neck_samples(&mut rng, samples, false);
            let r = pullback_report(&map, &rot, &rot, Factor::Fit, &s, tol);
            let mut lmax = 0.0f64;
            for smp in &s {
                let q = map.eval(&smp.point)?;
                lmax = lmax.max((layer_time(&q)? + layer_time(&smp.point)?).abs());
            }
            let eq = neck_samples(&mut rng, samples, true);
            let er = pullback_report(&map, &rot, &rot, Factor::Fit, &eq, tol);
            (r, Some(NeckChecks { layer_identity_max: lmax, layer_identity_pass: lmax <= 1e-9, equator: er }))
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown audit '{other}' (expected one of {})",
                AUDIT_NAMES.join(", ")
            )))
        }
    };
    Ok(AuditResult { audit: name.to_string(), report, neck })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_named_audits_run() {
        for name in AUDIT_NAMES {
            let r = run_audit(name, 50, 1e-9, 0).unwrap();
            if name == "neck-involution" {
                let n = r.neck.unwrap();
                assert!(n.layer_identity_pass && n.equator.pass);
                assert!(!r.report.pass && r.report.counterexample.is_some());
            } else {
                assert!(r.report.pass, "{name}: {}", r.report.max_residual);
            }
        }
        assert!(run_audit("nope", 10, 1e-9, 0).is_err());
    }
}
