//! One generation of the disjoint-merging induction.
//!
//! Every existing region R is classified against each incoming cube C with neighborhoods
//! N1 and N2: (i) R inside N1; (ii) R inside N2 and disjoint from C; (iii) R disjoint from N1.
//! The output replaces each C by K = N1 together with its type-(ii) regions; type-(i) regions
//! are absorbed and regions of type (iii) for every cube are kept.

use serde::{Deserialize, Serialize};

use super::boxes::{QBox, Region, Space, SweepIndex};
use super::rat::{self, Q};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Incoming {
    pub cube: QBox,
    pub n1: QBox,
    pub n2: QBox,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeType {
    InsideN1,
    InsideN2,
    Disjoint,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergeLogEntry {
    pub cube: String,
    pub absorbed_inside_n1: usize,
    pub absorbed_inside_n2: usize,
}

#[derive(Debug, Clone)]
pub struct MergeOutcome {
    pub regions: Vec<Region>,
    pub log: Vec<MergeLogEntry>,
    /// Largest squared diameter among output regions.
    pub max_diam_sq: Q,
}

pub fn classify(r: &Region, c: &Incoming, space: Space) -> Result<(MergeType, Option<Vec<Vec<i128>>>)> {
    if !r.meets_box(&c.n2, space) {
        return Ok((MergeType::Disjoint, None));
    }
    if let Some(z) = r.inside(&c.n1, space) {
        return Ok((MergeType::InsideN1, Some(z)));
    }
    if !r.meets_box(&c.n1, space) {
        return Ok((MergeType::Disjoint, None));
    }
    if let Some(z) = r.inside(&c.n2, space) {
        if !r.meets_box(&c.cube, space) {
            return Ok((MergeType::InsideN2, Some(z)));
        }
    }
    Err(Error::Trichotomy(format!(
        "region [{}] meets N1({}) but is neither inside N1 nor inside N2 away from the cube",
        r.provenance.join(", "),
        c.label
    )))
}

pub fn merge_generation(space: Space, existing: &[Region], incoming: &[Incoming]) -> Result<MergeOutcome> {
    for i in 0..incoming.len() {
        for j in 0..i {
            if incoming[i].n2.meets(&incoming[j].n2, space) {
                return Err(Error::Precondition(format!(
                    "N2 boxes of {} and {} meet",
                    incoming[j].label, incoming[i].label
                )));
            }
        }
    }
    let hulls: Vec<QBox> = existing.iter().map(|r| r.hull()).collect();
    let index = SweepIndex::new(&hulls, space);
    let mut owner: Vec<Option<usize>> = vec![None; existing.len()];
    let mut kept: Vec<Region> = Vec::with_capacity(incoming.len());
    let mut log = Vec::with_capacity(incoming.len());
    for (b, c) in incoming.iter().enumerate() {
        let mut k = Region::single(c.n1.clone(), c.label.clone());
        let (mut n_i, mut n_ii) = (0, 0);
        let mut cands = index.candidates(&c.n2);
        cands.sort_unstable();
        for a in cands {
            let r = &existing[a];
            if !hulls[a].meets(&c.n2, space) {
                continue;
            }
            let (t, z) = classify(r, c, space)?;
            if t == MergeType::Disjoint {
                continue;
            }
            if let Some(prev) = owner[a] {
                return Err(Error::Trichotomy(format!(
                    "region [{}] claimed by {} and {}",
                    r.provenance.join(", "),
                    incoming[prev].label,
                    c.label
                )));
            }
            owner[a] = Some(b);
            match t {
                MergeType::InsideN1 => {
                    n_i += 1;
                    k.provenance.extend(r.provenance.iter().cloned());
                }
                MergeType::InsideN2 => {
                    n_ii += 1;
                    let z = z.expect("inside carries shifts");
                    for (bx, zz) in r.boxes.iter().zip(&z) {
                        let back: Vec<i128> = zz.iter().map(|v| -v).collect();
                        k.boxes.push(bx.shifted_int(&back));
                    }
                    k.provenance.extend(r.provenance.iter().cloned());
                }
                MergeType::Disjoint => unreachable!(),
            }
        }
        log.push(MergeLogEntry { cube: c.label.clone(), absorbed_inside_n1: n_i, absorbed_inside_n2: n_ii });
        kept.push(k);
    }
    let mut regions = kept;
    for (a, r) in existing.iter().enumerate() {
        if owner[a].is_none() {
            regions.push(r.clone());
        }
    }
    // postconditions
    for (b, c) in incoming.iter().enumerate() {
        if regions[b].inside(&c.n2, space).is_none() {
            return Err(Error::Trichotomy(format!("merged region of {} leaves N2", c.label)));
        }
    }
    if let Some((i, j)) = super::boxes::first_overlap(&regions, space) {
        return Err(Error::Trichotomy(format!(
            "output regions [{}] and [{}] meet",
            regions[i].provenance.join(", "),
            regions[j].provenance.join(", ")
        )));
    }
    let max_diam_sq = regions.iter().map(|r| r.diam_sq()).max().unwrap_or_else(rat::zero);
    Ok(MergeOutcome { regions, log, max_diam_sq })
}
