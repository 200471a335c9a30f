//! Sparse multivariate polynomials with real coefficients.
//!
//! Used for custom scalar fields, vector fields and 1-forms loaded from JSON.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub exps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub nvars: usize,
    pub terms: Vec<Term>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Poly { nvars, terms: vec![Term { coef: c, exps: vec![0; nvars] }] }
    }

    /// The coordinate function x_i.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Poly { nvars, terms: vec![Term { coef: 1.0, exps }] }
    }

    pub fn monomial(coef: f64, exps: Vec<u32>) -> Self {
        Poly { nvars: exps.len(), terms: vec![Term { coef, exps }] }
    }

    pub fn is_well_formed(&self) -> bool {
        self.terms.iter().all(|t| t.exps.len() == self.nvars && t.coef.is_finite())
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.exps.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let mut m = t.coef;
            for (x, &e) in p.iter().zip(&t.exps) {
                if e > 0 {
                    m *= x.powi(e as i32);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut terms = Vec::new();
        for t in &self.terms {
            let e = t.exps[i];
            if e == 0 {
                continue;
            }
            let mut exps = t.exps.clone();
            exps[i] -= 1;
            terms.push(Term { coef: t.coef * e as f64, exps });
        }
        Poly { nvars: self.nvars, terms }
    }

    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        (0..self.nvars).map(|i| self.derivative(i).eval(p)).collect()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Poly { nvars: self.nvars, terms }.simplified()
    }

    pub fn scale(&self, c: f64) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|t| Term { coef: t.coef * c, exps: t.exps.clone() }).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let exps = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
                terms.push(Term { coef: a.coef * b.coef, exps });
            }
        }
        Poly { nvars: self.nvars, terms }.simplified()
    }

    /// Merge equal monomials and drop zero coefficients; terms sorted by exponent.
    pub fn simplified(&self) -> Poly {
        let mut terms: Vec<Term> = Vec::new();
        let mut sorted = self.terms.clone();
        sorted.sort_by(|a, b| a.exps.cmp(&b.exps));
        for t in sorted {
            match terms.last_mut() {
                Some(last) if last.exps == t.exps => last.coef += t.coef,
                _ => terms.push(t),
            }
        }
        terms.retain(|t| t.coef != 0.0);
        Poly { nvars: self.nvars, terms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        // 2z + xy on (x, y, z)
        let h = Poly {
            nvars: 3,
            terms: vec![
                Term { coef: 2.0, exps: vec![0, 0, 1] },
                Term { coef: 1.0, exps: vec![1, 1, 0] },
            ],
        };
        assert_eq!(h.eval(&[2.0, 3.0, 1.0]), 8.0);
        assert_eq!(h.gradient(&[2.0, 3.0, 1.0]), vec![3.0, 2.0, 2.0]);
        assert_eq!(h.degree(), 2);
    }

    #[test]
    fn product_and_sum() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.add(&y).mul(&x.add(&y.scale(-1.0)));
        assert!((p.eval(&[3.0, 2.0]) - 5.0).abs() < 1e-15);
        assert_eq!(p.terms.len(), 2);
    }
}
