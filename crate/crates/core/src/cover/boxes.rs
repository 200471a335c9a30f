//! Axis-aligned boxes with rational corners, in R^d or on the flat torus R^d / Z^d.

use serde::{Deserialize, Serialize};

use super::rat::{self, ceil_int, floor_int, Q};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QBox {
    pub lo: Vec<Q>,
    pub hi: Vec<Q>,
}

/// Where boxes live: Euclidean space or the unit flat torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Euclidean,
    Torus,
}

impl QBox {
    pub fn new(lo: Vec<Q>, hi: Vec<Q>) -> Result<QBox> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::InvalidArgument("box needs lo < hi in every coordinate".into()));
        }
        Ok(QBox { lo, hi })
    }

    pub fn cube(lo: Vec<Q>, size: Q) -> QBox {
        let hi = lo.iter().map(|a| a + size).collect();
        QBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<Q> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (a + b) / rat::qi(2)).collect()
    }

    /// Concentric box with edge lengths scaled by `f`.
    pub fn scaled_about_center(&self, f: Q) -> QBox {
        let c = self.center();
        let half: Vec<Q> = self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a) * f / rat::qi(2)).collect();
        QBox {
            lo: c.iter().zip(&half).map(|(c, h)| c - h).collect(),
            hi: c.iter().zip(&half).map(|(c, h)| c + h).collect(),
        }
    }

    pub fn translated(&self, v: &[Q]) -> QBox {
        QBox {
            lo: self.lo.iter().zip(v).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(v).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn shifted_int(&self, z: &[i128]) -> QBox {
        let v: Vec<Q> = z.iter().map(|k| rat::qi(*k)).collect();
        self.translated(&v)
    }

    /// Per-coordinate gaps between two closed boxes in R^d.
    pub fn gaps(&self, other: &QBox) -> Vec<Q> {
        (0..self.dim())
            .map(|i| {
                let g1 = &other.lo[i] - &self.hi[i];
                let g2 = &self.lo[i] - &other.hi[i];
                let g = if g1 > g2 { g1 } else { g2 };
                if g > rat::zero() {
                    g
                } else {
                    rat::zero()
                }
            })
            .collect()
    }

    pub fn chebyshev_dist(&self, other: &QBox) -> Q {
        self.gaps(other).into_iter().fold(rat::zero(), |m, g| if g > m { g } else { m })
    }

    pub fn euclid_dist_sq(&self, other: &QBox) -> Q {
        self.gaps(other).iter().map(|g| g * g).sum()
    }

    /// Squared Euclidean diagonal.
    pub fn diam_sq(&self) -> Q {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a) * (b - a)).sum()
    }

    /// Closed boxes share a point.
    pub fn meets(&self, other: &QBox, space: Space) -> bool {
        match space {
            Space::Euclidean => (0..self.dim()).all(|i| self.lo[i] <= other.hi[i] && other.lo[i] <= self.hi[i]),
            Space::Torus => (0..self.dim()).all(|i| {
                // integer z with other + z meeting self: z in [lo_a - hi_b, hi_a - lo_b]
                floor_int(&(&self.hi[i] - &other.lo[i])) >= ceil_int(&(&self.lo[i] - &other.hi[i]))
            }),
        }
    }

    /// Integer shift z with self contained in other + z (z = 0 in Euclidean space).
    pub fn inside(&self, other: &QBox, space: Space) -> Option<Vec<i128>> {
        match space {
            Space::Euclidean => {
                let ok = (0..self.dim()).all(|i| other.lo[i] <= self.lo[i] && self.hi[i] <= other.hi[i]);
                ok.then(|| vec![0; self.dim()])
            }
            Space::Torus => {
                let mut z = Vec::with_capacity(self.dim());
                for i in 0..self.dim() {
                    let lo = ceil_int(&(&self.hi[i] - &other.hi[i]));
                    let hi = floor_int(&(&self.lo[i] - &other.lo[i]));
                    if lo > hi {
                        return None;
                    }
                    z.push(lo);
                }
                Some(z)
            }
        }
    }

    /// Whether the closed box contains the point (modulo Z^d on the torus).
    pub fn contains_point(&self, p: &[Q], space: Space) -> bool {
        (0..self.dim()).all(|i| match space {
            Space::Euclidean => self.lo[i] <= p[i] && p[i] <= self.hi[i],
            Space::Torus => {
                let z = ceil_int(&(&self.lo[i] - &p[i]));
                &p[i] + rat::qi(z) <= self.hi[i]
            }
        })
    }

    pub fn to_json(&self) -> BoxJson {
        BoxJson { lo: rat::fmt_vec(&self.lo), hi: rat::fmt_vec(&self.hi) }
    }

    pub fn from_json(b: &BoxJson) -> Result<QBox> {
        let lo = b.lo.iter().map(|s| rat::parse(s)).collect::<Result<Vec<_>>>()?;
        let hi = b.hi.iter().map(|s| rat::parse(s)).collect::<Result<Vec<_>>>()?;
        QBox::new(lo, hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxJson {
    pub lo: Vec<String>,
    pub hi: Vec<String>,
}

/// A finite union of boxes with a record of where its pieces came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub boxes: Vec<QBox>,
    pub provenance: Vec<String>,
}

impl Region {
    pub fn single(b: QBox, label: String) -> Region {
        Region { boxes: vec![b], provenance: vec![label] }
    }

    pub fn meets_box(&self, b: &QBox, space: Space) -> bool {
        self.boxes.iter().any(|a| a.meets(b, space))
    }

    pub fn meets(&self, other: &Region, space: Space) -> bool {
        other.boxes.iter().any(|b| self.meets_box(b, space))
    }

    /// Per-box shifts placing the region inside `b`, if it fits.
    pub fn inside(&self, b: &QBox, space: Space) -> Option<Vec<Vec<i128>>> {
        self.boxes.iter().map(|a| a.inside(b, space)).collect()
    }

    /// Bounding box of the stored (lifted) boxes.
    pub fn hull(&self) -> QBox {
        let d = self.boxes[0].dim();
        let mut lo = self.boxes[0].lo.clone();
        let mut hi = self.boxes[0].hi.clone();
        for b in &self.boxes[1..] {
            for i in 0..d {
                if b.lo[i] < lo[i] {
                    lo[i] = b.lo[i];
                }
                if b.hi[i] > hi[i] {
                    hi[i] = b.hi[i];
                }
            }
        }
        QBox { lo, hi }
    }

    /// Squared diameter bound: the diagonal of the hull of the lifted boxes.
    pub fn diam_sq(&self) -> Q {
        self.hull().diam_sq()
    }

    pub fn to_json(&self) -> RegionJson {
        RegionJson { boxes: self.boxes.iter().map(|b| b.to_json()).collect(), provenance: self.provenance.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionJson {
    pub boxes: Vec<BoxJson>,
    pub provenance: Vec<String>,
}

/// Boxes sorted by their first lower coordinate (reduced mod 1 on the torus), for
/// candidate lookup by overlap of first-coordinate intervals.
pub struct SweepIndex {
    space: Space,
    keys: Vec<(Q, usize)>,
    width: Q,
    len: usize,
}

impl SweepIndex {
    pub fn new(boxes: &[QBox], space: Space) -> SweepIndex {
        let mut keys: Vec<(Q, usize)> = boxes
            .iter()
            .enumerate()
            .map(|(i, b)| (if space == Space::Torus { rat::frac(&b.lo[0]) } else { b.lo[0] }, i))
            .collect();
        keys.sort();
        let width = boxes.iter().map(|b| &b.hi[0] - &b.lo[0]).max().unwrap_or_else(rat::zero);
        SweepIndex { space, keys, width, len: boxes.len() }
    }

    fn range(&self, a: Q, b: Q, out: &mut Vec<usize>) {
        let start = self.keys.partition_point(|(k, _)| *k < a);
        for (k, i) in &self.keys[start..] {
            if *k > b {
                break;
            }
            out.push(*i);
        }
    }

    /// Indices of boxes whose first-coordinate interval may meet that of `b`.
    pub fn candidates(&self, b: &QBox) -> Vec<usize> {
        let mut out = Vec::new();
        let a = &b.lo[0] - &self.width;
        let hi = b.hi[0];
        match self.space {
            Space::Euclidean => self.range(a, hi, &mut out),
            Space::Torus => {
                if &hi - &a >= rat::one() {
                    return (0..self.len).collect();
                }
                let shift = a.floor();
                let (a, hi) = (a - shift, hi - shift);
                if hi < rat::one() {
                    self.range(a, hi, &mut out);
                } else {
                    self.range(a, rat::one(), &mut out);
                    self.range(rat::zero(), hi - rat::one(), &mut out);
                }
            }
        }
        out
    }
}

/// First pair of regions (indices) that meet, if any.
pub fn first_overlap(regions: &[Region], space: Space) -> Option<(usize, usize)> {
    let hulls: Vec<QBox> = regions.iter().map(|r| r.hull()).collect();
    let index = SweepIndex::new(&hulls, space);
    let mut best: Option<(usize, usize)> = None;
    for i in 0..regions.len() {
        for j in index.candidates(&hulls[i]) {
            if j < i && hulls[i].meets(&hulls[j], space) && regions[i].meets(&regions[j], space) {
                if best.map_or(true, |b| (i, j) < (b.1, b.0)) {
                    best = Some((j, i));
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::rat::{q, qi};

    fn b(lo: &[Q], hi: &[Q]) -> QBox {
        QBox::new(lo.to_vec(), hi.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_tests() {
        let a = b(&[qi(0), qi(0)], &[qi(1), qi(1)]);
        let c = b(&[qi(1), q(1, 2)], &[qi(2), qi(2)]);
        assert!(a.meets(&c, Space::Euclidean));
        let e = c.translated(&[q(1, 3), qi(0)]);
        assert!(!a.meets(&e, Space::Euclidean));
        assert_eq!(a.chebyshev_dist(&e), q(1, 3));
        assert_eq!(a.euclid_dist_sq(&e), q(1, 9));
        assert!(b(&[q(1, 4), q(1, 4)], &[q(1, 2), q(1, 2)]).inside(&a, Space::Euclidean).is_some());
    }

    #[test]
    fn torus_wraps() {
        let a = b(&[q(9, 10)], &[q(11, 10)]);
        let c = b(&[q(1, 20)], &[q(1, 10)]);
        assert!(a.meets(&c, Space::Torus));
        assert!(!a.meets(&c, Space::Euclidean));
        assert_eq!(c.inside(&a, Space::Torus), Some(vec![-1]));
        assert!(a.contains_point(&[qi(0)], Space::Torus));
        assert!(!a.contains_point(&[q(1, 2)], Space::Torus));
        let far = b(&[q(3, 10)], &[q(4, 10)]);
        assert!(!a.meets(&far, Space::Torus));
    }
}
