//! The (d+1)-colored cube cover of R^d.
//!
//! Cube k = (k_1..k_d) at scale s has lower corner
//!   anchor_j = s ((k_j - 1) + sum_{m > j} lambda_{jm} (k_m - 1))
//! and color 1 + (sum_j c_j (k_j - 1) mod (d + 1)).

use serde::{Deserialize, Serialize};

use super::boxes::QBox;
use super::rat::{self, floor_int, q, qi, Q};
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;

/// Shift of coordinate j per layer of coordinate m (0-based, j < m).
pub fn lambda(d: usize, j: usize, m: usize) -> Q {
    debug_assert!(j < m && m < d);
    if d == 4 {
        let num = match (j, m) {
            (0, 1) => 1,
            (0, 2) => 2,
            (0, 3) => 3,
            (1, 2) => 2,
            (1, 3) => 1,
            _ => 1,
        };
        q(num, 4)
    } else {
        q((m - j) as i128, d as i128)
    }
}

pub fn color_coeffs(d: usize) -> &'static [i128] {
    match d {
        1 => &[1],
        2 => &[1, 2],
        3 => &[1, 3, 2],
        _ => &[1, 4, 3, 2],
    }
}

pub fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::InvalidArgument(format!("dimension cover supports 1 <= d <= {MAX_DIM}, got {d}")));
    }
    Ok(())
}

fn check_scale(s: &Q) -> Result<()> {
    if *s <= rat::zero() {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeId {
    pub d: usize,
    pub s: Q,
    pub k: Vec<i128>,
    pub anchor: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeJson {
    pub d: usize,
    pub s: String,
    pub k: Vec<i128>,
    pub anchor: Vec<String>,
    pub color: u32,
}

/// s * sum_{m > j} lambda_{jm} (k_m - 1).
fn lower_shift(d: usize, s: &Q, k: &[i128], j: usize) -> Q {
    let mut t = rat::zero();
    for m in j + 1..d {
        t += lambda(d, j, m) * qi(k[m] - 1);
    }
    t * s
}

impl CubeId {
    pub fn from_layers(d: usize, s: Q, k: Vec<i128>) -> Result<CubeId> {
        check_dim(d)?;
        check_scale(&s)?;
        if k.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: k.len() });
        }
        let anchor = (0..d).map(|j| s * qi(k[j] - 1) + lower_shift(d, &s, &k, j)).collect();
        Ok(CubeId { d, s, k, anchor })
    }

    pub fn to_box(&self) -> QBox {
        QBox::cube(self.anchor.clone(), self.s)
    }

    pub fn color(&self) -> u32 {
        color_of(self)
    }

    pub fn to_json(&self) -> CubeJson {
        CubeJson {
            d: self.d,
            s: rat::fmt(&self.s),
            k: self.k.clone(),
            anchor: rat::fmt_vec(&self.anchor),
            color: self.color(),
        }
    }
}

/// The cube containing `point` under the half-open convention [anchor, anchor + s).
pub fn cube_at(point: &[Q], d: usize, s: Q) -> Result<CubeId> {
    check_dim(d)?;
    check_scale(&s)?;
    if point.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: point.len() });
    }
    let mut k = vec![0i128; d];
    for j in (0..d).rev() {
        let base = lower_shift(d, &s, &k, j);
        k[j] = floor_int(&((point[j] - base) / s)) + 1;
    }
    CubeId::from_layers(d, s, k)
}

pub fn color_of(c: &CubeId) -> u32 {
    let cs = color_coeffs(c.d);
    let t: i128 = (0..c.d).map(|j| cs[j] * (c.k[j] - 1)).sum();
    1 + t.rem_euclid(c.d as i128 + 1) as u32
}

/// N1 and N2: concentric closed boxes of sizes (1 + 1/(4d)) s and (1 + 1/(2d)) s.
pub fn neighborhoods(c: &CubeId) -> (QBox, QBox) {
    let b = c.to_box();
    let d = c.d as i128;
    (b.scaled_about_center(qi(1) + q(1, 4 * d)), b.scaled_about_center(qi(1) + q(1, 2 * d)))
}

/// All cubes meeting the closed box `window` (or, with `inside`, contained in it).
pub fn cubes_in(d: usize, s: Q, window: &QBox, inside: bool) -> Result<Vec<CubeId>> {
    check_dim(d)?;
    check_scale(&s)?;
    if window.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: window.dim() });
    }
    let mut out = Vec::new();
    let mut k = vec![0i128; d];
    rec(d, &s, window, inside, d, &mut k, &mut out);
    Ok(out)
}

fn rec(d: usize, s: &Q, w: &QBox, inside: bool, level: usize, k: &mut Vec<i128>, out: &mut Vec<CubeId>) {
    if level == 0 {
        out.push(CubeId::from_layers(d, *s, k.clone()).expect("validated"));
        return;
    }
    let j = level - 1;
    let base = lower_shift(d, s, k, j);
    // cube j-extent: [base + s (k - 1), base + s k]
    let (kmin, kmax) = if inside {
        (rat::ceil_int(&((w.lo[j] - base) / s)) + 1, floor_int(&((w.hi[j] - base) / s)))
    } else {
        (rat::ceil_int(&((w.lo[j] - base) / s)), floor_int(&((w.hi[j] - base) / s)) + 1)
    };
    for kj in kmin..=kmax {
        k[j] = kj;
        rec(d, s, w, inside, level - 1, k, out);
    }
    k[j] = 0;
}
