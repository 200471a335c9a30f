//! The (d+1)-colored cube cover of R^d with exact rational arithmetic, and the disjoint
//! merging of chart covers on the flat torus.

pub mod boxes;
pub mod layout;
pub mod merge;
pub mod rat;
pub mod separation;
pub mod svg;
pub mod torus;

pub use boxes::{QBox, Region, Space};
pub use layout::{color_of, cube_at, cubes_in, neighborhoods, CubeId};
pub use merge::{merge_generation, Incoming, MergeOutcome};
pub use separation::{layer_window, separation_report, SeparationReport};
pub use torus::{torus_cover, Chart, ChartsFile, CoverPlan, TorusOptions};
