//! Contact forms on R^N, contact vector fields, flows and audited model maps.

pub mod audits;
pub mod cuboid;
pub mod field;
pub mod form;
pub mod hamiltonian;
pub mod maps;
pub mod neck;
pub mod pullback;
pub mod spec;
pub mod starshaped;
pub mod uniformize;

pub use cuboid::{cuboid_epsilon, cuboid_field, Cuboid, CuboidCertificate};
pub use field::{flow, ScalarField, VectorField};
pub use form::{make_form, FormKind, OneForm};
pub use hamiltonian::{contact_field_report, field_of_hamiltonian, hamiltonian_of_field, reeb_field};
pub use maps::{cotangent_lift, jet_to_standard, sphere_jet_iso, SmoothMap};
pub use neck::{layer_time, neck_involution};
pub use pullback::{pullback_report, Factor, PullbackReport};
pub use spec::{overtwisted_transverse_field, FormSpec, VectorFieldSpec};
pub use starshaped::{star_shaped_report, Domain, StarShapedCertificate, StarShapedOptions};
pub use uniformize::{starshaped_uniformization, Uniformizer};
