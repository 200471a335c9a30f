//! Brute-force same-color separation in a window of the cube cover.

use serde::{Deserialize, Serialize};

use super::boxes::{QBox, Space};
use super::layout::{cubes_in, neighborhoods, CubeId, CubeJson};
use super::rat::{self, q, Q};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColorSeparation {
    pub color: u32,
    pub cubes: usize,
    pub min_chebyshev: String,
    pub min_euclidean_sq: String,
    pub min_euclidean: f64,
    pub witness: [CubeJson; 2],
    pub n2_disjoint: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationReport {
    pub d: usize,
    pub s: String,
    pub window: super::boxes::BoxJson,
    pub expected: String,
    pub colors: Vec<ColorSeparation>,
    pub min_chebyshev: String,
    pub min_euclidean: f64,
    /// Chebyshev and Euclidean minima agree (they differ only if the closest pair is diagonal).
    pub metrics_agree: bool,
    pub n2_disjoint: bool,
    pub pass: bool,
}

struct Stats {
    cheb: Q,
    eu2: Q,
    witness: (CubeId, CubeId),
    n2_ok: bool,
}

fn color_stats(cubes: &[&CubeId]) -> Stats {
    let boxes: Vec<QBox> = cubes.iter().map(|c| c.to_box()).collect();
    let n2: Vec<QBox> = cubes.iter().map(|c| neighborhoods(c).1).collect();
    let mut best: Option<(Q, Q, usize, usize)> = None;
    let mut n2_ok = true;
    for i in 0..boxes.len() {
        for j in 0..i {
            let c = boxes[i].chebyshev_dist(&boxes[j]);
            let e = boxes[i].euclid_dist_sq(&boxes[j]);
            let better = match &best {
                None => true,
                Some((bc, be, _, _)) => c < *bc || (c == *bc && e < *be),
            };
            if better {
                best = Some((c, e, j, i));
            }
            if n2[i].meets(&n2[j], Space::Euclidean) {
                n2_ok = false;
            }
        }
    }
    // the Euclidean minimum may come from a different pair than the Chebyshev one
    let mut eu2 = best.as_ref().map(|b| b.1).unwrap_or_else(rat::zero);
    for i in 0..boxes.len() {
        for j in 0..i {
            let e = boxes[i].euclid_dist_sq(&boxes[j]);
            if e < eu2 {
                eu2 = e;
            }
        }
    }
    let (c, _, a, b) = best.expect("at least two cubes");
    Stats { cheb: c, eu2, witness: (cubes[a].clone(), cubes[b].clone()), n2_ok }
}

/// Same-color distances between cubes contained in `window`. `color = None` checks every color.
pub fn separation_report(d: usize, s: Q, color: Option<u32>, window: &QBox) -> Result<SeparationReport> {
    let cubes = cubes_in(d, s, window, true)?;
    let colors: Vec<u32> = match color {
        Some(c) if c >= 1 && c as usize <= d + 1 => vec![c],
        Some(c) => return Err(Error::InvalidArgument(format!("color {c} out of range 1..={}", d + 1))),
        None => (1..=d as u32 + 1).collect(),
    };
    let mut out = Vec::new();
    for col in colors {
        let mine: Vec<&CubeId> = cubes.iter().filter(|c| c.color() == col).collect();
        if mine.len() < 2 {
            return Err(Error::WindowTooSmall(format!(
                "window holds {} cube(s) of color {col}; at least 2 are needed",
                mine.len()
            )));
        }
        let st = color_stats(&mine);
        out.push(ColorSeparation {
            color: col,
            cubes: mine.len(),
            min_chebyshev: rat::fmt(&st.cheb),
            min_euclidean_sq: rat::fmt(&st.eu2),
            min_euclidean: rat::to_f64(&st.eu2).sqrt(),
            witness: [st.witness.0.to_json(), st.witness.1.to_json()],
            n2_disjoint: st.n2_ok,
        });
    }
    let expected = s / q(d as i128, 1);
    let cheb: Vec<Q> = out.iter().map(|c| rat::parse(&c.min_chebyshev).expect("own format")).collect();
    let eu2: Vec<Q> = out.iter().map(|c| rat::parse(&c.min_euclidean_sq).expect("own format")).collect();
    let min_c = cheb.iter().min().copied().expect("nonempty");
    let min_e = eu2.iter().min().copied().expect("nonempty");
    let n2 = out.iter().all(|c| c.n2_disjoint);
    Ok(SeparationReport {
        d,
        s: rat::fmt(&s),
        window: window.to_json(),
        expected: rat::fmt(&expected),
        min_chebyshev: rat::fmt(&min_c),
        min_euclidean: rat::to_f64(&min_e).sqrt(),
        metrics_agree: min_c * min_c == min_e,
        n2_disjoint: n2,
        pass: cheb.iter().all(|c| *c == expected) && n2,
        colors: out,
    })
}

/// The window [-m s, m s]^d.
pub fn layer_window(d: usize, s: Q, m: i128) -> QBox {
    QBox::new(vec![-s * rat::qi(m); d], vec![s * rat::qi(m); d]).expect("m > 0")
}
