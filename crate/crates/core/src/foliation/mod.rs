//! Characteristic foliations on embedded 2-spheres.

pub mod cycles;
pub mod dividing;
pub mod extensive;
pub mod field;
pub mod graphs;
pub mod orbit;
pub mod partition;
pub mod report;
pub mod singular;
pub mod surgery;
pub mod svg;
pub mod verdicts;
pub mod sphere;

pub use field::{characteristic_field, Provenance, TangentField, TangentFieldSpec};
pub use sphere::{Chart, SphereSurface};
pub use singular::{classify_singular, find_singular_points, PointType, Sign, SingularOptions, SingularPointRecord};
pub use orbit::{trace_orbit, Direction, Limit, Orbit, TraceBudget};
pub use cycles::{find_limit_cycles, CycleOptions, CycleRecord, CycleStability};
pub use dividing::{dividing_set, DividingSet};
pub use graphs::{build_graphs, Graph, OrbitGraph};
pub use verdicts::{convexity_report, stability_class, tightness_report, StabilityClass, Verdict};
pub use report::{analyze, analyze_input, AnalysisOptions, FoliationInput, FoliationReport};
pub use extensive::{extensive_report, find_extensive_curve, great_circle, ExtensiveReport, ExtensiveSearch};
pub use surgery::{break_limit_cycle, eliminate_graph_loop, SurgeryRecord, SurgeryResult};
pub use partition::{three_chart_partition, Model, PartitionInput, PartitionReport};
pub use svg::foliation_svg;
