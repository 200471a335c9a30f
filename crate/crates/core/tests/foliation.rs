use std::path::Path;

use contopo::foliation::extensive::check_embedded;
use contopo::foliation::sphere::{norm, sub};
use contopo::foliation::{
    analyze_input, break_limit_cycle, eliminate_graph_loop, extensive_report, find_extensive_curve, foliation_svg,
    great_circle, three_chart_partition, AnalysisOptions, CycleStability, FoliationInput, FoliationReport, Model,
    PartitionInput, PointType, Sign, StabilityClass, TangentField, Verdict,
};
use contopo::Error;

fn load(name: &str) -> FoliationInput {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"));
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn analyzed(name: &str) -> (TangentField, FoliationReport) {
    let f = load(name);
    let r = analyze_input(&f, &AnalysisOptions::default()).unwrap();
    (f.field().unwrap(), r)
}

const FIXTURES: [&str; 15] = [
    "closed-form-dz",
    "equator-attracting",
    "equator-degenerate",
    "equator-repelling",
    "height-gradient",
    "negative-loop-2",
    "negative-loop-3",
    "overtwisted-r2",
    "overtwisted-r4",
    "retrograde",
    "rotation",
    "round-rotational",
    "round-standard",
    "saddle-node",
    "two-sources-saddle",
];

#[test]
fn signs_follow_divergence_and_types() {
    for name in FIXTURES {
        let (_, r) = analyzed(name);
        for p in &r.singular_points {
            assert_eq!(p.sign, Sign::of(p.divergence), "{name}: point {}", p.id);
            match p.point_type {
                Some(PointType::Source) => assert!(p.divergence > 0.0, "{name}"),
                Some(PointType::Sink) => assert!(p.divergence < 0.0, "{name}"),
                Some(t) => assert_eq!(p.index, t.index(), "{name}"),
                None => assert!(p.status.is_some(), "{name}: unresolved point without status"),
            }
        }
    }
}

/// A Newton step in the other stereographic chart must not move a located zero.
#[test]
fn locations_agree_across_charts() {
    for name in ["equator-attracting", "two-sources-saddle", "negative-loop-2", "saddle-node", "overtwisted-r4"] {
        let (y, r) = analyzed(name);
        let s = y.sphere;
        for p in r.singular_points.iter().filter(|p| p.point_type.is_some()) {
            for chart in [p.chart, p.chart.other()] {
                if !s.in_chart_domain(chart, &p.position) {
                    continue;
                }
                let u = s.to_chart(chart, &p.position);
                let v = y.chart_vector(chart, &u);
                let j = y.chart_jacobian(chart, &u);
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                if det.abs() < 1e-10 {
                    continue;
                }
                let du = [(-v[0] * j[1][1] + v[1] * j[0][1]) / det, (v[0] * j[1][0] - v[1] * j[0][0]) / det];
                let q = s.from_chart(chart, &[u[0] + du[0], u[1] + du[1]]);
                assert!(norm(&sub(&q, &p.position)) < 1e-6 * s.radius, "{name}: point {} moves in {chart:?}", p.id);
            }
        }
    }
}

#[test]
fn round_sphere_verdicts() {
    let (_, r) = analyzed("round-standard");
    assert_eq!(r.singular_points.len(), 2);
    assert!(r.cycles.is_empty());
    assert_eq!(r.verdicts.tight, Verdict::Yes);
    assert_eq!(r.verdicts.criteria_agree, Some(true));
    assert_eq!(r.verdicts.stability_class, StabilityClass::StructurallyStable);
    let (_, r) = analyzed("round-rotational");
    assert_eq!(r.verdicts.tight, Verdict::Yes);
}

#[test]
fn cycles_are_classified() {
    let (_, r) = analyzed("equator-attracting");
    assert_eq!(r.cycles.len(), 1);
    assert_eq!(r.cycles[0].stability, CycleStability::Attracting);
    // the return map contracts by exp(-2 pi)
    assert!((r.cycles[0].lambda / (-2.0 * std::f64::consts::PI).exp() - 1.0).abs() < 1e-2, "{}", r.cycles[0].lambda);
    let (_, r) = analyzed("equator-repelling");
    assert_eq!(r.cycles[0].stability, CycleStability::Repelling);
    let (_, r) = analyzed("equator-degenerate");
    assert!(r.cycles.iter().any(|c| c.degenerate));
    assert_eq!(r.verdicts.convex, Verdict::No);
    assert_eq!(r.verdicts.stability_class, StabilityClass::Q2);
}

#[test]
fn graph_loops_and_retrograde_connections() {
    let (_, r) = analyzed("negative-loop-2");
    assert_eq!(r.graphs.negative.rank, 1);
    assert_eq!(r.verdicts.tight_by_graph, Verdict::No);
    let (_, r) = analyzed("negative-loop-3");
    assert_eq!(r.graphs.negative.rank, 2);
    let (_, r) = analyzed("two-sources-saddle");
    assert_eq!(r.graphs.positive.rank, 0);
    assert_eq!(r.graphs.positive.vertices.len(), 3);
    let (_, r) = analyzed("retrograde");
    assert_eq!(r.verdicts.convex, Verdict::No);
    assert!(!r.graphs.retrograde.is_empty());
}

#[test]
fn unresolved_points_are_reported() {
    for name in ["rotation", "closed-form-dz"] {
        let (_, r) = analyzed(name);
        assert!(!r.all_points_resolved, "{name}");
        assert_eq!(r.verdicts.tight, Verdict::Inconclusive, "{name}");
    }
}

#[test]
fn break_both_cycle_kinds() {
    let opts = AnalysisOptions::default();
    for (name, inserted) in [("equator-attracting", PointType::Sink), ("equator-repelling", PointType::Source)] {
        let (y, r) = analyzed(name);
        let s = break_limit_cycle(&y, &r, 0, &opts).unwrap();
        assert!(s.record.verified, "{name}: {:?}", s.record.notes);
        assert_eq!(s.record.singular_after, r.singular_points.len() + 2);
        assert_eq!(s.record.cycles_after, 0);
        assert!(s.record.inserted.iter().any(|p| p.point_type == Some(inserted)));
        assert!(s.record.inserted.iter().any(|p| p.point_type == Some(PointType::Saddle)));
    }
    let (y, r) = analyzed("equator-degenerate");
    let k = r.cycles.iter().position(|c| c.degenerate).unwrap();
    assert!(matches!(break_limit_cycle(&y, &r, k, &opts), Err(Error::Degenerate(_))));
}

#[test]
fn loops_removed_one_at_a_time() {
    let opts = AnalysisOptions::default();
    let (y, r) = analyzed("negative-loop-3");
    let first = eliminate_graph_loop(&y, &r, Sign::Negative, 0, &opts).unwrap();
    assert_eq!(first.record.rank_after[1], 1, "{:?}", first.record.notes);
    let second = eliminate_graph_loop(&first.field, &first.report, Sign::Negative, 0, &opts).unwrap();
    assert_eq!(second.record.rank_after[1], 0, "{:?}", second.record.notes);
    assert!(matches!(eliminate_graph_loop(&y, &r, Sign::Positive, 0, &opts), Err(Error::Precondition(_))));
}

#[test]
fn extensive_curves() {
    let (y, r) = analyzed("round-standard");
    let found = find_extensive_curve(&y, &r).unwrap();
    assert!(found.found && found.report.extensive);

    // the equator is an orbit of the equator-cycle field, so it cannot be transverse
    let (y, r) = analyzed("equator-attracting");
    let eq = great_circle(&y.sphere, &[0.0, 0.0, 1.0], 720);
    let rep = extensive_report(&eq, &y, &r).unwrap();
    assert!(!rep.extensive);
    assert!(rep.failures() > 0);
    assert!(find_extensive_curve(&y, &r).unwrap().found);

    let (y, r) = analyzed("retrograde");
    assert!(matches!(find_extensive_curve(&y, &r), Err(Error::Precondition(_))));

    let mut open = eq.clone();
    open.truncate(300);
    assert!(check_embedded(&y.sphere, &open).is_err());
}

#[test]
fn partitions() {
    let p = three_chart_partition(&PartitionInput::uniform(Model::S2xS1, 4, 1), 400, 64).unwrap();
    assert!(p.covers && p.disjoint);
    assert_eq!(p.charts.len(), 3);
    assert!(p.charts.iter().all(|c| c.margin.map_or(true, |m| m > 0.0)));

    let p = three_chart_partition(&PartitionInput::uniform(Model::S3, 4, 2), 400, 64).unwrap();
    assert!(p.covers && p.disjoint);
    assert_eq!(p.coverage.covered, p.coverage.grid_points);

    let mut odd = PartitionInput::uniform(Model::S2xS1, 4, 1);
    odd.subdivision = vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
    assert!(matches!(three_chart_partition(&odd, 100, 16), Err(Error::Precondition(_))));

    let coarse = PartitionInput::uniform(Model::S2xS1, 16, 1);
    assert!(matches!(three_chart_partition(&coarse, 100, 16), Err(Error::Precondition(_))));
}

#[test]
fn svg_portrait() {
    let (_, r) = analyzed("negative-loop-2");
    let doc = foliation_svg(&r);
    assert!(doc.starts_with("<svg") && doc.contains(r#"version="1.1""#));
    assert!(doc.contains(r#"class="gminus""#));
    let (_, r) = analyzed("overtwisted-r4");
    let doc = foliation_svg(&r);
    assert!(doc.contains(r#"class="cycle""#) && doc.contains(r#"class="dividing""#));
}

#[test]
fn analysis_is_deterministic() {
    for name in ["overtwisted-r4", "saddle-node"] {
        let a = serde_json::to_string(&analyzed(name).1).unwrap();
        let b = serde_json::to_string(&analyzed(name).1).unwrap();
        assert_eq!(a, b, "{name}");
    }
}
