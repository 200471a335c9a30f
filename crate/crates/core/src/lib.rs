//! Contact-topology toolkit: contact forms and audited model maps, the colored cube cover of
//! R^d, characteristic foliations on 2-spheres and covering-number bounds.

pub mod bounds;
pub mod contact;
pub mod cover;
pub mod error;
pub mod foliation;
pub mod ode;
pub mod poly;

pub use error::{Error, Result};

/// Version tag embedded in every serialized report.
pub const SCHEMA_VERSION: &str = "1.0.0";
