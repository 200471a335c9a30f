//! The full analysis pipeline and its JSON report.

use serde::{Deserialize, Serialize};

use super::cycles::{find_limit_cycles, CycleOptions, CycleRecord};
use super::dividing::{dividing_set, DividingSet, DEFAULT_LEVEL};
use super::field::{Provenance, TangentField, TangentFieldSpec};
use super::graphs::{build_graphs, OrbitGraph};
use super::singular::{find_singular_points, index_sum, SingularOptions, SingularPointRecord};
use super::sphere::{SphereSurface, V3};
use super::verdicts::{
    convexity_report, stability_class, tightness_report, ConvexityReport, StabilityClass, StabilityReport, TightnessReport,
    Verdict,
};
use crate::contact::{FormSpec, OneForm, VectorField, VectorFieldSpec};
use crate::error::{Error, Result};

/// A foliation fixture or command input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoliationInput {
    pub name: String,
    pub surface: SphereSurface,
    pub field: TangentFieldSpec,
    /// Transverse contact vector field for the dividing-set criterion.
    #[serde(default)]
    pub transverse: Option<VectorFieldSpec>,
}

impl FoliationInput {
    pub fn field(&self) -> Result<TangentField> {
        self.field.build(self.surface)
    }

    pub fn form(&self) -> Result<Option<OneForm>> {
        match &self.field {
            TangentFieldSpec::Characteristic { form } => Ok(Some(form.build()?)),
            _ => Ok(None),
        }
    }

    pub fn transverse_field(&self) -> Result<Option<VectorField>> {
        self.transverse.as_ref().map(|t| t.build()).transpose()
    }

    pub fn form_spec(&self) -> Option<&FormSpec> {
        match &self.field {
            TangentFieldSpec::Characteristic { form } => Some(form),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AnalysisOptions {
    pub singular: SingularOptions,
    pub cycles: CycleOptions,
    /// Separatrix budget in units of radius / typical speed.
    pub separatrix_budget: f64,
    pub mesh_level: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            singular: SingularOptions::default(),
            cycles: CycleOptions::default(),
            separatrix_budget: 400.0,
            mesh_level: DEFAULT_LEVEL,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdicts {
    pub convex: Verdict,
    pub tight: Verdict,
    pub tight_by_graph: Verdict,
    pub tight_by_dividing_set: Option<Verdict>,
    pub criteria_agree: Option<bool>,
    pub stability_class: StabilityClass,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoliationReport {
    pub name: String,
    pub surface: SphereSurface,
    pub provenance: Provenance,
    pub transition_residual: f64,
    pub singular_points: Vec<SingularPointRecord>,
    pub index_sum: i32,
    pub all_points_resolved: bool,
    pub cycles: Vec<CycleRecord>,
    pub graphs: OrbitGraph,
    pub convexity: ConvexityReport,
    pub tightness: TightnessReport,
    pub stability: StabilityReport,
    pub dividing_set: Option<DividingSet>,
    pub dividing_set_error: Option<String>,
    pub verdicts: Verdicts,
}

impl FoliationReport {
    /// Verdicts that could not be decided.
    pub fn inconclusive(&self) -> bool {
        self.verdicts.tight == Verdict::Inconclusive || self.verdicts.convex == Verdict::Inconclusive
    }
}

fn decimate(poly: &[V3], max: usize) -> Vec<V3> {
    if poly.len() <= max {
        return poly.to_vec();
    }
    let step = (poly.len() - 1) as f64 / (max - 1) as f64;
    (0..max).map(|i| poly[((i as f64 * step).round() as usize).min(poly.len() - 1)]).collect()
}

/// Runs every stage on a field; the dividing set is computed when a form and transverse
/// field are supplied.
pub fn analyze(
    name: &str,
    y: &TangentField,
    transverse: Option<(&OneForm, &VectorField)>,
    opts: &AnalysisOptions,
) -> Result<FoliationReport> {
    let points = find_singular_points(y, &opts.singular)?;
    analyze_with_points(name, y, points, transverse, opts)
}

pub fn analyze_with_points(
    name: &str,
    y: &TangentField,
    points: Vec<SingularPointRecord>,
    transverse: Option<(&OneForm, &VectorField)>,
    opts: &AnalysisOptions,
) -> Result<FoliationReport> {
    let cycles = find_limit_cycles(y, &points, &opts.cycles);
    let mut graphs = build_graphs(y, &points, opts.separatrix_budget);
    for s in &mut graphs.separatrices {
        s.polyline = decimate(&s.polyline, 300);
    }
    for g in [&mut graphs.positive, &mut graphs.negative] {
        for e in &mut g.edges {
            e.polyline = decimate(&e.polyline, 300);
        }
    }
    let convexity = convexity_report(&points, &cycles, &graphs);
    let tightness = tightness_report(&cycles, &graphs, &convexity);
    let stability = stability_class(&points, &cycles, &graphs, opts.cycles.tol_cycle);
    let (dividing, dividing_err) = match transverse {
        Some((form, x)) => match dividing_set(&y.sphere, form, x, opts.mesh_level) {
            Ok(d) => (Some(d), None),
            Err(e) => (None, Some(e.to_string())),
        },
        None => (None, None),
    };
    let by_div = dividing.as_ref().map(|d| Verdict::from_bool(d.components == 1));
    let by_graph = tightness.tight;
    let (tight, agree) = match by_div {
        Some(dv) if by_graph != Verdict::Inconclusive => {
            if dv == by_graph {
                (dv, Some(true))
            } else {
                (Verdict::Inconclusive, Some(false))
            }
        }
        Some(dv) => (dv, None),
        None => (by_graph, None),
    };
    let verdicts = Verdicts {
        convex: convexity.convex,
        tight,
        tight_by_graph: by_graph,
        tight_by_dividing_set: by_div,
        criteria_agree: agree,
        stability_class: stability.class,
    };
    Ok(FoliationReport {
        name: name.into(),
        surface: y.sphere,
        provenance: y.provenance.clone(),
        transition_residual: y.transition_residual(200),
        index_sum: index_sum(&points),
        all_points_resolved: points.iter().all(|p| p.resolved()),
        singular_points: points,
        cycles,
        graphs,
        convexity,
        tightness,
        stability,
        dividing_set: dividing,
        dividing_set_error: dividing_err,
        verdicts,
    })
}

/// Parses and analyzes a fixture.
pub fn analyze_input(input: &FoliationInput, opts: &AnalysisOptions) -> Result<FoliationReport> {
    let y = input.field()?;
    let form = input.form()?;
    let x = input.transverse_field()?;
    if x.is_some() && form.is_none() {
        return Err(Error::Schema("a transverse field needs a characteristic (form-based) field".into()));
    }
    let tr = match (&form, &x) {
        (Some(f), Some(x)) => Some((f, x)),
        _ => None,
    };
    analyze(&input.name, &y, tr, opts)
}
