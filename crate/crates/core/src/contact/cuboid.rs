//! Cuboids in R^{2n+1} and their contact star-shapedness certificate.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::VectorField;
use crate::error::{Error, Result};

/// Axis-parallel box with center (x0, y0, z0) and half-edges a_i, b_i, c.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cuboid {
    pub x0: Vec<f64>,
    pub y0: Vec<f64>,
    pub z0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl Cuboid {
    pub fn n(&self) -> usize {
        self.x0.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.n() + 1
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 || self.y0.len() != n || self.a.len() != n || self.b.len() != n {
            return Err(Error::InvalidArgument("cuboid component lengths disagree".into()));
        }
        let edges = self.a.iter().chain(&self.b).chain(std::iter::once(&self.c));
        if edges.clone().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::Degenerate("cuboid half-edges must be strictly positive".into()));
        }
        Ok(())
    }

    pub fn center(&self) -> Vec<f64> {
        let mut p = self.x0.clone();
        p.extend_from_slice(&self.y0);
        p.push(self.z0);
        p
    }

    pub fn half_edges(&self) -> Vec<f64> {
        let mut h = self.a.clone();
        h.extend_from_slice(&self.b);
        h.push(self.c);
        h
    }

    /// The contactomorphism tau(x, y, z) = (x - x0, y - y0, z - z0 + x0 (y - y0)).
    pub fn tau(&self, p: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut q = vec![0.0; 2 * n + 1];
        let mut s = p[2 * n] - self.z0;
        for i in 0..n {
            q[i] = p[i] - self.x0[i];
            q[n + i] = p[n + i] - self.y0[i];
            s += self.x0[i] * q[n + i];
        }
        q[2 * n] = s;
        q
    }

    pub fn tau_inv(&self, q: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut p = vec![0.0; 2 * n + 1];
        let mut s = q[2 * n] + self.z0;
        for i in 0..n {
            p[i] = q[i] + self.x0[i];
            p[n + i] = q[n + i] + self.y0[i];
            s -= self.x0[i] * q[n + i];
        }
        p[2 * n] = s;
        p
    }

    fn tau_matrix(&self, inverse: bool) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::identity(2 * n + 1, 2 * n + 1);
        for i in 0..n {
            m[(2 * n, n + i)] = if inverse { -self.x0[i] } else { self.x0[i] };
        }
        m
    }

    /// Mz = max |x0 . (y - y0)| over the z-faces.
    pub fn mz(&self) -> f64 {
        self.x0.iter().zip(&self.b).map(|(x, b)| x.abs() * b).sum()
    }
}

/// X_eps = (eps x, (1 + eps) y, (1 + 2 eps) z).
pub fn x_eps_diag(n: usize, eps: f64) -> Vec<f64> {
    let mut d = vec![eps; n];
    d.extend(std::iter::repeat(1.0 + eps).take(n));
    d.push(1.0 + 2.0 * eps);
    d
}

/// The pushforward (tau^{-1})_* X_eps, an affine contact field vanishing only at the center.
pub fn cuboid_field(q: &Cuboid, eps: f64) -> VectorField {
    let n = q.n();
    let dim = q.dim();
    let d = x_eps_diag(n, eps);
    let (t, ti) = (q.tau_matrix(false), q.tau_matrix(true));
    let lin = &ti * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d.clone())) * &t;
    let (q1, q2) = (q.clone(), q.clone());
    let (l1, l2) = (lin.clone(), lin.clone());
    let (d1, d2) = (d.clone(), d);
    let (t2, ti2) = (t.clone(), ti.clone());
    VectorField::from_fn("cuboid-field", dim, move |p| {
        let c = q1.center();
        let dp = nalgebra::DVector::from_iterator(dim, p.iter().zip(&c).map(|(a, b)| a - b));
        (&l1 * dp).iter().copied().collect()
    })
    .with_jacobian(move |_| l2.clone())
    .with_flow(
        move |p, s| {
            let tp = q2.tau(p);
            let f: Vec<f64> = tp.iter().zip(&d1).map(|(x, k)| x * (k * s).exp()).collect();
            q2.tau_inv(&f)
        },
        move |_, s| {
            let e = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, d2.iter().map(|k| (k * s).exp())));
            &ti2 * e * &t2
        },
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FaceMargin {
    /// Coordinate index of the face normal.
    pub axis: usize,
    /// +1 for the upper face, -1 for the lower.
    pub side: i8,
    pub samples: usize,
    pub min_margin: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CuboidCertificate {
    pub epsilon: f64,
    pub mz: f64,
    /// Lower bound (1 + 2 eps) c - eps Mz for the z-face margin.
    pub z_margin_bound: f64,
    pub faces: Vec<FaceMargin>,
    pub min_margin: f64,
    pub failures: usize,
    pub pass: bool,
}

/// eps = c / (2 max(Mz, c)) and a sampled certificate that (tau^{-1})_* X_eps points
/// outward on every face of Q (`per_face` uniform samples on each of the 2(2n+1) faces).
pub fn cuboid_epsilon(q: &Cuboid, per_face: usize, seed: u64) -> Result<CuboidCertificate> {
    q.validate()?;
    let mz = q.mz();
    let eps = q.c / (2.0 * mz.max(q.c));
    let field = cuboid_field(q, eps);
    let center = q.center();
    let h = q.half_edges();
    let dim = q.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut faces = Vec::with_capacity(2 * dim);
    let mut p = vec![0.0; dim];
    for axis in 0..dim {
        for side in [-1i8, 1] {
            let mut min_m = f64::INFINITY;
            let mut fails = 0;
            for _ in 0..per_face {
                for k in 0..dim {
                    p[k] = center[k] + if k == axis { side as f64 * h[k] } else { rng.gen_range(-h[k]..=h[k]) };
                }
                let m = side as f64 * field.eval(&p)[axis];
                if !(m > 0.0) {
                    fails += 1;
                }
                min_m = min_m.min(m);
            }
            faces.push(FaceMargin { axis, side, samples: per_face, min_margin: min_m, failures: fails });
        }
    }
    let min_margin = faces.iter().map(|f| f.min_margin).fold(f64::INFINITY, f64::min);
    let failures = faces.iter().map(|f| f.failures).sum();
    Ok(CuboidCertificate {
        epsilon: eps,
        mz,
        z_margin_bound: (1.0 + 2.0 * eps) * q.c - eps * mz,
        faces,
        min_margin,
        failures,
        pass: failures == 0 && min_margin > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::field::flow;
    use crate::contact::form::OneForm;
    use crate::contact::hamiltonian::contact_field_report;
    use crate::ode::OdeOptions;

    fn centered() -> Cuboid {
        Cuboid { x0: vec![0.0], y0: vec![0.0], z0: 0.0, a: vec![1.0], b: vec![2.0], c: 0.5 }
    }

    #[test]
    fn centered_cuboid_gives_half() {
        let c = cuboid_epsilon(&centered(), 200, 0).unwrap();
        assert_eq!(c.epsilon, 0.5);
        assert!(c.pass && c.min_margin > 0.0);
    }

    #[test]
    fn offset_cuboid_small_eps() {
        let q = Cuboid { x0: vec![10.0], y0: vec![0.0], z0: 0.0, a: vec![1.0], b: vec![1.0], c: 0.1 };
        let c = cuboid_epsilon(&q, 2000, 1).unwrap();
        assert!((c.epsilon - 0.1 / 20.0).abs() < 1e-15);
        assert!(c.pass && c.z_margin_bound > 0.0);
    }

    #[test]
    fn degenerate_rejected() {
        let mut q = centered();
        q.c = 0.0;
        assert!(matches!(cuboid_epsilon(&q, 10, 0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn tau_is_a_contactomorphism_and_field_is_contact() {
        let q = Cuboid { x0: vec![1.5, -2.0], y0: vec![0.5, 1.0], z0: 3.0, a: vec![1.0, 1.0], b: vec![1.0, 1.0], c: 1.0 };
        let p = [0.2, 0.4, -0.7, 1.1, 0.3];
        assert!(q.tau_inv(&q.tau(&p)).iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-14));
        let f = cuboid_field(&q, 0.1);
        let pts: Vec<Vec<f64>> = vec![p.to_vec(), q.center(), vec![1.0, -1.0, 1.0, 2.0, 2.5]];
        assert!(contact_field_report(&f, &OneForm::standard(2), &pts, 1e-7).is_contact);
        assert!(f.eval(&q.center()).iter().all(|v| v.abs() < 1e-15));
        let a = flow(&f, &p, 0.8, &OdeOptions::default()).unwrap();
        let b = crate::contact::field::flow_numeric(&f, &p, 0.8, &OdeOptions::default()).unwrap();
        assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() < 1e-7));
    }
}
