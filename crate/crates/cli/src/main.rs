//! contopo: audits, covers, foliation analyses and covering-number bounds from the command line.
//!
//! Exit codes: 0 pass, 1 usage or schema error, 2 counterexample or failed check,
//! 3 inconclusive (including an exhausted work budget).

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use contopo::bounds::{bounds_report, ManifoldDescriptor};
use contopo::contact::audits::{run_audit, AUDIT_NAMES};
use contopo::contact::{star_shaped_report, Domain, StarShapedOptions, VectorFieldSpec};
use contopo::cover::svg::{cover_window_svg, torus_plan_svg};
use contopo::cover::torus::load_charts;
use contopo::cover::{rat, separation_report, torus_cover, ChartsFile, QBox, TorusOptions};
use contopo::foliation::{analyze_input, foliation_svg, AnalysisOptions, FoliationInput, SphereSurface, TangentFieldSpec, Verdict};
use contopo::{Error, SCHEMA_VERSION};

use output::{check_outputs, emit, timestamp, write_atomic, Envelope, ErrorInfo};

#[derive(Parser)]
#[command(name = "contopo", version, about = "Contact-topology audits, covers, foliations and bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every random choice; embedded in the report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Pull back a contact form along a model map and compare with the target form.
    Audit {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(AUDIT_NAMES))]
        name: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9, value_parser = positive)]
        tol: f64,
    },
    /// Analyze the characteristic foliation of a sphere.
    Foliation {
        /// Fixture with name, surface, field and optional transverse field.
        input: Option<PathBuf>,
        /// Sphere surface JSON (alternative to a fixture, together with --form).
        #[arg(long, conflicts_with = "input", requires = "form")]
        surface: Option<PathBuf>,
        /// Contact form JSON.
        #[arg(long, requires = "surface")]
        form: Option<PathBuf>,
        /// Transverse contact vector field JSON for the dividing-set criterion.
        #[arg(long, requires = "surface")]
        transverse: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_parser = positive)]
        tol_eig: Option<f64>,
        #[arg(long, value_parser = positive)]
        tol_cycle: Option<f64>,
        /// Icosphere refinement level for the dividing set.
        #[arg(long)]
        mesh_level: Option<usize>,
    },
    /// Colored cube cover of R^d: same-color separation and N2 disjointness in a window.
    Cover {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "1")]
        scale: String,
        /// Window [lo, hi]^d, rationals such as -6, 1/2 or 0.375.
        #[arg(long, num_args = 2, allow_negative_numbers = true, value_names = ["LO", "HI"])]
        window: Vec<String>,
        /// Check a single color.
        #[arg(long)]
        color: Option<u32>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Draw N1 and N2 outlines in the SVG.
        #[arg(long)]
        outlines: bool,
    },
    /// Cover of the flat torus by d+1 families of disjoint regions.
    TorusCover {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        charts: PathBuf,
        /// Grid points per axis for the coverage check.
        #[arg(long)]
        resolution: Option<u64>,
        /// Maximum number of cubes over all generations.
        #[arg(long)]
        cube_budget: Option<u64>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Bounds on cup-length, category, B and C for a manifold descriptor.
    Bounds { descriptor: PathBuf },
    /// Star-shapedness certificate for a domain and a vector field.
    StarShaped {
        input: PathBuf,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, value_parser = positive)]
        escape_radius: Option<f64>,
        #[arg(long, default_value_t = 1e4, value_parser = positive)]
        max_time: f64,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{s} is not a positive number"))
    }
}

#[derive(Deserialize)]
struct StarShapedInput {
    domain: Domain,
    field: VectorFieldSpec,
}

struct Fail {
    code: i32,
    kind: String,
    message: String,
}

impl Fail {
    fn usage(kind: &str, message: impl Into<String>) -> Fail {
        Fail { code: 1, kind: kind.into(), message: message.into() }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidArgument(_) => "invalid_argument",
        Error::UnsupportedKind(_) => "unsupported_kind",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::Integration(_) => "integration",
        Error::Singular(_) => "singular",
        Error::Degenerate(_) => "degenerate",
        Error::WindowTooSmall(_) => "window_too_small",
        Error::Trichotomy(_) => "trichotomy",
        Error::ChartsDoNotCover(_) => "charts_do_not_cover",
        Error::IndeterminateAtTolerance(_) => "indeterminate_at_tolerance",
        Error::NotACharacteristicFoliation(_) => "not_a_characteristic_foliation",
        Error::NotTransverse(_) => "not_transverse",
        Error::Precondition(_) => "precondition",
        Error::Schema(_) => "schema",
        Error::Budget(_) => "budget",
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::Budget(_) | Error::IndeterminateAtTolerance(_) => 3,
            _ => 1,
        };
        Fail { code, kind: error_kind(&e).into(), message: e.to_string() }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail::usage("io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail::usage("schema", format!("{}: {e}", path.display())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

struct Outcome {
    result: Value,
    code: i32,
    /// SVG documents to write next to the report.
    figures: Vec<(PathBuf, String)>,
}

fn figure(path: &Option<PathBuf>, make: impl FnOnce() -> contopo::Result<String>) -> Result<Vec<(PathBuf, String)>, Fail> {
    match path {
        Some(p) => Ok(vec![(p.clone(), make()?)]),
        None => Ok(vec![]),
    }
}

fn run(cmd: &Command, seed: u64) -> Result<Outcome, Fail> {
    match cmd {
        Command::Audit { name, samples, tol } => {
            let r = run_audit(name, *samples, *tol, seed)?;
            Ok(Outcome { code: if r.pass() { 0 } else { 2 }, result: to_value(&r), figures: vec![] })
        }
        Command::Foliation { input, surface, form, transverse, svg, tol_eig, tol_cycle, mesh_level } => {
            let fixture: FoliationInput = match (input, surface, form) {
                (Some(p), _, _) => read_json(p)?,
                (None, Some(s), Some(f)) => {
                    let surface: SphereSurface = read_json(s)?;
                    let form = read_json(f)?;
                    let transverse: Option<VectorFieldSpec> = transverse.as_deref().map(read_json).transpose()?;
                    FoliationInput { name: "characteristic".into(), surface, field: TangentFieldSpec::Characteristic { form }, transverse }
                }
                _ => return Err(Fail::usage("usage", "give a fixture or both --surface and --form")),
            };
            let mut opts = AnalysisOptions::default();
            if let Some(t) = tol_eig {
                opts.singular.tol_eig = *t;
            }
            if let Some(t) = tol_cycle {
                opts.cycles.tol_cycle = *t;
            }
            if let Some(l) = mesh_level {
                opts.mesh_level = *l;
            }
            let rep = analyze_input(&fixture, &opts)?;
            let v = &rep.verdicts;
            let code = if v.tight == Verdict::Inconclusive || v.convex == Verdict::Inconclusive { 3 } else { 0 };
            let figures = figure(svg, || Ok(foliation_svg(&rep)))?;
            Ok(Outcome { result: to_value(&rep), code, figures })
        }
        Command::Cover { dim, scale, window, color, svg, outlines } => {
            let s = rat::parse(scale)?;
            if s <= rat::zero() {
                return Err(Fail::usage("invalid_argument", "scale must be positive"));
            }
            let (lo, hi) = (rat::parse(&window[0])?, rat::parse(&window[1])?);
            let w = QBox::new(vec![lo; *dim], vec![hi; *dim])?;
            let r = separation_report(*dim, s, *color, &w)?;
            let figures = figure(svg, || cover_window_svg(s, &w, *outlines))?;
            Ok(Outcome { code: if r.pass { 0 } else { 2 }, result: to_value(&r), figures })
        }
        Command::TorusCover { dim, charts, resolution, cube_budget, svg } => {
            let file: ChartsFile = read_json(charts)?;
            if file.d != *dim {
                return Err(Error::DimensionMismatch { expected: *dim, got: file.d }.into());
            }
            let cs = load_charts(&file)?;
            let mut opts = TorusOptions::for_dim(*dim);
            if let Some(r) = resolution {
                opts.resolution = *r;
            }
            if let Some(b) = cube_budget {
                opts.cube_budget = *b;
            }
            let plan = torus_cover(*dim, &cs, &opts)?;
            let figures = figure(svg, || torus_plan_svg(&plan))?;
            Ok(Outcome { code: if plan.pass { 0 } else { 2 }, result: to_value(&plan), figures })
        }
        Command::Bounds { descriptor } => {
            let m: ManifoldDescriptor = read_json(descriptor)?;
            let r = bounds_report(&m)?;
            Ok(Outcome { code: 0, result: to_value(&r), figures: vec![] })
        }
        Command::StarShaped { input, samples, escape_radius, max_time } => {
            let inp: StarShapedInput = read_json(input)?;
            let field = inp.field.build()?;
            let opts = StarShapedOptions { samples: *samples, seed, escape_radius: *escape_radius, max_time: *max_time };
            let cert = star_shaped_report(&inp.domain, &field, &opts)?;
            Ok(Outcome { code: if cert.pass { 0 } else { 2 }, result: to_value(&cert), figures: vec![] })
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Audit { .. } => "audit",
        Command::Foliation { .. } => "foliation",
        Command::Cover { .. } => "cover",
        Command::TorusCover { .. } => "torus-cover",
        Command::Bounds { .. } => "bounds",
        Command::StarShaped { .. } => "star-shaped",
    }
}

fn opt(p: &Option<PathBuf>) -> Vec<&Path> {
    p.as_deref().into_iter().collect()
}

fn paths(cmd: &Command) -> (Vec<&Path>, Vec<&Path>) {
    match cmd {
        Command::Audit { .. } => (vec![], vec![]),
        Command::Foliation { input, surface, form, transverse, svg, .. } => {
            ([opt(input), opt(surface), opt(form), opt(transverse)].concat(), opt(svg))
        }
        Command::Cover { svg, .. } => (vec![], opt(svg)),
        Command::TorusCover { charts, svg, .. } => (vec![charts.as_path()], opt(svg)),
        Command::Bounds { descriptor } => (vec![descriptor.as_path()], vec![]),
        Command::StarShaped { input, .. } => (vec![input.as_path()], vec![]),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (inputs, mut outputs) = paths(&cli.command);
    outputs.extend(cli.out.as_deref());
    if let Err(msg) = check_outputs(&inputs, &outputs) {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    let (result, error, code, figures) = match run(&cli.command, cli.seed) {
        Ok(o) => (Some(o.result), None, o.code, o.figures),
        Err(f) => {
            eprintln!("error: {}", f.message);
            (None, Some(ErrorInfo { kind: f.kind, message: f.message }), f.code, vec![])
        }
    };
    for (path, doc) in &figures {
        if let Err(e) = write_atomic(path, doc.as_bytes()) {
            eprintln!("error: writing {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        command: command_name(&cli.command),
        seed: cli.seed,
        timestamp: timestamp(),
        exit_code: code,
        result,
        error,
    };
    let mut json = serde_json::to_string_pretty(&env).expect("envelope serializes");
    json.push('\n');
    if let Err(e) = emit(cli.out.as_deref(), &json) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code as u8)
}
