//! SVG 1.1 brick diagrams for d = 2.

use std::fmt::Write;

use super::boxes::QBox;
use super::layout::{cubes_in, neighborhoods};
use super::rat::{self, Q};
use super::torus::CoverPlan;
use crate::error::{Error, Result};

pub const SIZE: f64 = 600.0;
pub const MARGIN: f64 = 20.0;
/// Fill colors by color index 1..=5.
pub const PALETTE: [&str; 5] = ["#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4"];

fn header(out: &mut String) {
    let full = SIZE + 2.0 * MARGIN;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{full}" height="{full}" viewBox="0 0 {full} {full}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{full}" height="{full}" fill="white"/>"#);
}

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Frame {
    fn rect(&self, out: &mut String, lo: [f64; 2], hi: [f64; 2], style: &str) {
        let x = MARGIN + (lo[0] - self.x0) * self.scale;
        let y = MARGIN + SIZE - (hi[1] - self.y0) * self.scale;
        let w = (hi[0] - lo[0]) * self.scale;
        let h = (hi[1] - lo[1]) * self.scale;
        let _ = writeln!(out, r#"<rect x="{x:.3}" y="{y:.3}" width="{w:.3}" height="{h:.3}" {style}/>"#);
    }
}

fn corners(b: &QBox) -> ([f64; 2], [f64; 2]) {
    ([rat::to_f64(&b.lo[0]), rat::to_f64(&b.lo[1])], [rat::to_f64(&b.hi[0]), rat::to_f64(&b.hi[1])])
}

/// Colored cubes meeting `window`, with N1 (solid) and N2 (dashed) outlines.
pub fn cover_window_svg(s: Q, window: &QBox, outlines: bool) -> Result<String> {
    if window.dim() != 2 {
        return Err(Error::InvalidArgument("SVG output is drawn for d = 2 only".into()));
    }
    let cubes = cubes_in(2, s, window, false)?;
    let (lo, hi) = corners(window);
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let f = Frame { x0: lo[0], y0: lo[1], scale: SIZE / span };
    let mut out = String::new();
    header(&mut out);
    for c in &cubes {
        let (a, b) = corners(&c.to_box());
        let col = PALETTE[(c.color() - 1) as usize];
        f.rect(&mut out, a, b, &format!(r#"fill="{col}" fill-opacity="0.55" stroke="black" stroke-width="0.5""#));
    }
    if outlines {
        for c in &cubes {
            let (n1, n2) = neighborhoods(c);
            let col = PALETTE[(c.color() - 1) as usize];
            let (a, b) = corners(&n1);
            f.rect(&mut out, a, b, &format!(r#"fill="none" stroke="{col}" stroke-width="0.8""#));
            let (a, b) = corners(&n2);
            f.rect(&mut out, a, b, &format!(r#"fill="none" stroke="{col}" stroke-width="0.6" stroke-dasharray="3,2""#));
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Regions of a d = 2 torus plan drawn in the unit square, wrapped mod 1.
pub fn torus_plan_svg(plan: &CoverPlan) -> Result<String> {
    if plan.d != 2 {
        return Err(Error::InvalidArgument("SVG output is drawn for d = 2 only".into()));
    }
    let f = Frame { x0: 0.0, y0: 0.0, scale: SIZE };
    let mut out = String::new();
    header(&mut out);
    let _ = writeln!(out, r#"<clipPath id="unit"><rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}"/></clipPath>"#);
    let _ = writeln!(out, r#"<g clip-path="url(#unit)">"#);
    for fam in &plan.families {
        let col = PALETTE[(fam.color - 1) as usize];
        for r in &fam.regions {
            for bj in &r.boxes {
                let b = QBox::from_json(bj)?;
                let (a, c) = corners(&b);
                let (sx, sy) = (a[0].floor(), a[1].floor());
                for dx in [0.0, 1.0] {
                    for dy in [0.0, 1.0] {
                        let lo = [a[0] - sx - dx, a[1] - sy - dy];
                        let hi = [c[0] - sx - dx, c[1] - sy - dy];
                        if hi[0] > 0.0 && hi[1] > 0.0 && lo[0] < 1.0 && lo[1] < 1.0 {
                            f.rect(&mut out, lo, hi, &format!(r#"fill="{col}" fill-opacity="0.6" stroke="none""#));
                        }
                    }
                }
            }
        }
    }
    out.push_str("</g>\n");
    f.rect(&mut out, [0.0, 0.0], [1.0, 1.0], r#"fill="none" stroke="black" stroke-width="1""#);
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::rat::qi;

    #[test]
    fn window_svg_draws_every_cube() {
        let w = QBox::new(vec![qi(-2); 2], vec![qi(2); 2]).unwrap();
        let s = cover_window_svg(qi(1), &w, false).unwrap();
        let n = cubes_in(2, qi(1), &w, false).unwrap().len();
        assert_eq!(s.matches("<rect").count(), n + 1);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
    }
}
