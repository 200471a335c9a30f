//! Phase portraits: orthographic views of the two hemispheres side by side.

use std::fmt::Write;

use super::report::FoliationReport;
use super::singular::{PointType, Sign};
use super::sphere::{SphereSurface, V3};

const DISC: f64 = 280.0;
const MARGIN: f64 = 20.0;
const GAP: f64 = 40.0;

const POSITIVE: &str = "#c0392b";
const NEGATIVE: &str = "#2166ac";

/// Hemisphere (0 north, 1 south) and canvas position of a point.
fn place(s: &SphereSurface, p: &V3) -> (usize, f64, f64) {
    let q = s.q(p);
    let (h, x) = if q[2] >= 0.0 { (0, q[0]) } else { (1, -q[0]) };
    let cx = MARGIN + DISC + h as f64 * (2.0 * DISC + GAP);
    let cy = MARGIN + DISC;
    (h, cx + x * DISC, cy - q[1] * DISC)
}

fn polyline(out: &mut String, s: &SphereSurface, pts: &[V3], style: &str) {
    let mut run: Vec<(f64, f64)> = Vec::new();
    let mut side = usize::MAX;
    let flush = |run: &mut Vec<(f64, f64)>, out: &mut String| {
        if run.len() > 1 {
            let d: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" {style}/>"#, d.join(" "));
        }
        run.clear();
    };
    for p in pts {
        let (h, x, y) = place(s, p);
        if h != side {
            flush(&mut run, out);
            side = h;
        }
        run.push((x, y));
    }
    flush(&mut run, out);
}

pub fn foliation_svg(rep: &FoliationReport) -> String {
    let s = rep.surface;
    let w = 2.0 * MARGIN + 4.0 * DISC + GAP;
    let h = 2.0 * MARGIN + 2.0 * DISC + 30.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        r#"<style>.sep{{stroke:#999;stroke-width:0.8}} .gplus{{stroke:{POSITIVE};stroke-width:2.2}} .gminus{{stroke:{NEGATIVE};stroke-width:2.2}} .cycle{{stroke:#1a9850;stroke-width:2}} .dividing{{stroke:black;stroke-width:1.2;stroke-dasharray:6 4}}</style>"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    for (k, label) in ["z >= 0 (from above)", "z <= 0 (from below)"].iter().enumerate() {
        let cx = MARGIN + DISC + k as f64 * (2.0 * DISC + GAP);
        let _ = writeln!(out, r##"<circle cx="{cx}" cy="{}" r="{DISC}" fill="#fafafa" stroke="black"/>"##, MARGIN + DISC);
        let _ = writeln!(
            out,
            r#"<text x="{cx}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">{label}</text>"#,
            2.0 * MARGIN + 2.0 * DISC + 10.0
        );
    }
    for sep in &rep.graphs.separatrices {
        polyline(&mut out, &s, &sep.polyline, r#"class="sep""#);
    }
    for e in &rep.graphs.positive.edges {
        polyline(&mut out, &s, &e.polyline, r#"class="gplus""#);
    }
    for e in &rep.graphs.negative.edges {
        polyline(&mut out, &s, &e.polyline, r#"class="gminus""#);
    }
    for c in &rep.cycles {
        polyline(&mut out, &s, &c.polyline, r#"class="cycle""#);
    }
    if let Some(d) = &rep.dividing_set {
        for c in &d.curves {
            polyline(&mut out, &s, c, r#"class="dividing""#);
        }
    }
    for p in &rep.singular_points {
        let (_, x, y) = place(&s, &p.position);
        let col = match p.sign {
            Sign::Positive => POSITIVE,
            Sign::Negative => NEGATIVE,
        };
        match p.point_type {
            Some(PointType::Source) | Some(PointType::Sink) => {
                let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="6" fill="{col}" stroke="black"/>"#);
            }
            Some(PointType::Saddle) => {
                let _ = writeln!(
                    out,
                    r#"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="{col}" stroke-width="3"/>"#,
                    x - 6.0,
                    y - 6.0,
                    x + 6.0,
                    y + 6.0,
                    x - 6.0,
                    y + 6.0,
                    x + 6.0,
                    y - 6.0
                );
            }
            Some(_) => {
                let _ = writeln!(
                    out,
                    r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{col}" stroke="black"/>"#,
                    x,
                    y - 7.0,
                    x - 6.0,
                    y + 5.0,
                    x + 6.0,
                    y + 5.0
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="none" stroke="{col}" stroke-width="2"/>"#,
                    x - 5.0,
                    y - 5.0
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
