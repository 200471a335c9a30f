//! JSON descriptions of forms and vector fields.

use serde::{Deserialize, Serialize};

use super::field::VectorField;
use super::form::OneForm;
use super::hamiltonian::field_of_hamiltonian;
use crate::contact::ScalarField;
use crate::error::{Error, Result};
use crate::poly::Poly;

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormSpec {
    Standard {
        #[serde(default = "one")]
        n: usize,
    },
    Rotational {
        #[serde(default = "one")]
        n: usize,
    },
    Jet {
        #[serde(default = "one")]
        n: usize,
    },
    SphereRestriction {
        #[serde(default = "one")]
        n: usize,
    },
    /// cos r dz + r sin r dphi on R^3.
    Overtwisted,
    Custom {
        coeffs: Vec<Poly>,
    },
}

impl FormSpec {
    pub fn build(&self) -> Result<OneForm> {
        let check = |n: usize| {
            if n == 0 {
                Err(Error::Schema("form needs n >= 1".into()))
            } else {
                Ok(n)
            }
        };
        Ok(match self {
            FormSpec::Standard { n } => OneForm::standard(check(*n)?),
            FormSpec::Rotational { n } => OneForm::rotational(check(*n)?),
            FormSpec::Jet { n } => OneForm::jet(check(*n)?),
            FormSpec::SphereRestriction { n } => OneForm::sphere_restriction(check(*n)?),
            FormSpec::Overtwisted => OneForm::overtwisted_model(),
            FormSpec::Custom { coeffs } => OneForm::custom_poly("custom", coeffs.clone())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VectorFieldSpec {
    Polys { components: Vec<Poly> },
    /// The contact field of a polynomial Hamiltonian for the given form.
    Hamiltonian { hamiltonian: Poly, form: FormSpec },
    /// Contact field of z cos r for the overtwisted model, transverse to large round spheres.
    OvertwistedTransverse,
}

impl VectorFieldSpec {
    pub fn build(&self) -> Result<VectorField> {
        match self {
            VectorFieldSpec::Polys { components } => VectorField::from_polys("polys", components.clone()),
            VectorFieldSpec::Hamiltonian { hamiltonian, form } => {
                let f = form.build()?;
                if hamiltonian.nvars != f.dim || !hamiltonian.is_well_formed() {
                    return Err(Error::Schema("hamiltonian polynomial does not match the form dimension".into()));
                }
                field_of_hamiltonian(&ScalarField::from_poly("H", hamiltonian.clone()), &f)
            }
            VectorFieldSpec::OvertwistedTransverse => Ok(overtwisted_transverse_field()),
        }
    }
}

/// X = (x k/(1+k), y k/(1+k), z) with k = cos r sin r / r: the contact field of H = z cos r
/// for cos r dz + r sin r dphi.
pub fn overtwisted_transverse_field() -> VectorField {
    VectorField::from_fn("X_ot", 3, |p| {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        let sinc = if r < 1e-4 { 1.0 - r * r / 6.0 } else { r.sin() / r };
        let k = sinc * r.cos();
        let w = k / (1.0 + k);
        vec![p[0] * w, p[1] * w, p[2]]
    })
}
