//! The disjoint-merging induction on the flat torus T^d = R^d / Z^d.
//!
//! Chart i is x -> b_i + L_i x (mod 1) on the unit ball. Cube scales and merge radii are
//! chosen from the last chart backwards:
//!   s_l   largest dyadic with L_l (2 + 2 s (1 + 1/(4d))) < 1 (the N2 hull embeds),
//!   s_i   largest dyadic with diam phi_i(N2(C)) = L_i (1 + 1/(2d)) s sqrt(d) < delta_{i+1},
//!   delta_i = min(delta_{i+1}, L_i s_i / (8d)).
//! Merges then run forwards from chart 1 (finest cubes) to chart l, one color at a time.

use serde::{Deserialize, Serialize};

use super::boxes::{QBox, Region, RegionJson, Space, SweepIndex};
use super::layout::{check_dim, cubes_in, neighborhoods, CubeId};
use super::merge::{merge_generation, Incoming};
use super::rat::{self, q, qi, Q};
use crate::error::{Error, Result};

/// Default cap on the number of cubes enumerated over all charts.
pub const DEFAULT_CUBE_BUDGET: u64 = 200_000;
/// Grid points per axis for coverage checks: 512^d capped at 10^7 points.
pub fn default_resolution(d: usize) -> u64 {
    let mut r = 512u64;
    while r.pow(d as u32) > 10_000_000 {
        r -= 1;
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartJson {
    pub offset: Vec<String>,
    pub lipschitz: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartsFile {
    pub d: usize,
    pub charts: Vec<ChartJson>,
}

/// Affine flat chart x -> offset + lipschitz * x.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub offset: Vec<Q>,
    pub lipschitz: Q,
}

impl Chart {
    pub fn from_json(c: &ChartJson) -> Result<Chart> {
        let offset = c.offset.iter().map(|s| rat::parse(s)).collect::<Result<Vec<_>>>()?;
        let lipschitz = rat::parse(&c.lipschitz)?;
        if lipschitz <= rat::zero() {
            return Err(Error::InvalidArgument("chart scale must be positive".into()));
        }
        Ok(Chart { offset, lipschitz })
    }

    pub fn to_json(&self) -> ChartJson {
        ChartJson { offset: rat::fmt_vec(&self.offset), lipschitz: rat::fmt(&self.lipschitz) }
    }

    pub fn image(&self, b: &QBox) -> QBox {
        QBox {
            lo: b.lo.iter().zip(&self.offset).map(|(x, o)| o + x * self.lipschitz).collect(),
            hi: b.hi.iter().zip(&self.offset).map(|(x, o)| o + x * self.lipschitz).collect(),
        }
    }
}

pub fn load_charts(file: &ChartsFile) -> Result<Vec<Chart>> {
    check_dim(file.d)?;
    if file.charts.is_empty() {
        return Err(Error::InvalidArgument("no charts".into()));
    }
    let charts = file.charts.iter().map(Chart::from_json).collect::<Result<Vec<_>>>()?;
    for c in &charts {
        if c.offset.len() != file.d {
            return Err(Error::DimensionMismatch { expected: file.d, got: c.offset.len() });
        }
    }
    Ok(charts)
}

/// Squared flat distance on the torus.
pub fn torus_dist_sq(a: &[Q], b: &[Q]) -> Q {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let f = rat::frac(&(x - y));
            let g = rat::one() - f;
            let m = if f < g { f } else { g };
            m * m
        })
        .sum()
}

fn grid_point(idx: u64, d: usize, res: u64) -> Vec<Q> {
    let mut v = Vec::with_capacity(d);
    let mut t = idx;
    for _ in 0..d {
        v.push(q((t % res) as i128, res as i128));
        t /= res;
    }
    v
}

/// Grid points of T^d not inside any chart's unit-ball image.
pub fn uncovered_by_charts(charts: &[Chart], d: usize, res: u64) -> (u64, Option<Vec<Q>>) {
    let total = res.pow(d as u32);
    let mut missed = 0;
    let mut first = None;
    for idx in 0..total {
        let p = grid_point(idx, d, res);
        let hit = charts.iter().any(|c| torus_dist_sq(&p, &c.offset) < c.lipschitz * c.lipschitz);
        if !hit {
            missed += 1;
            first.get_or_insert(p);
        }
    }
    (missed, first)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleEntry {
    pub chart: usize,
    pub s: String,
    pub delta: String,
    pub cubes_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct ScaleChain {
    pub s: Vec<Q>,
    pub delta: Vec<Q>,
    pub estimates: Vec<f64>,
}

fn largest_dyadic(ok: impl Fn(&Q) -> bool) -> Result<Q> {
    for k in 0..=40u32 {
        let s = q(1, 1i128 << k);
        if ok(&s) {
            return Ok(s);
        }
    }
    Err(Error::Budget("no admissible dyadic scale above 2^-40".into()))
}

/// The descending choice of s_i and delta_i.
pub fn scale_chain(charts: &[Chart], d: usize) -> Result<ScaleChain> {
    let l = charts.len();
    let dq = qi(d as i128);
    let mut s = vec![rat::zero(); l];
    let mut delta = vec![rat::zero(); l];
    let mut next: Option<Q> = None;
    for i in (0..l).rev() {
        let lip = charts[i].lipschitz;
        let embeds = |s: &Q| lip * (qi(2) + qi(2) * s * (qi(1) + q(1, 4 * d as i128))) < rat::one();
        let si = match &next {
            None => largest_dyadic(embeds)?,
            Some(dn) => {
                // diam bound compared in floating point with a safety factor; outputs are re-checked exactly
                let lipf = rat::to_f64(&lip);
                let bound = rat::to_f64(dn) / (lipf * (1.0 + 0.5 / d as f64) * (d as f64).sqrt()) * (1.0 - 1e-9);
                largest_dyadic(|s| embeds(s) && rat::to_f64(s) < bound)?
            }
        };
        let own = lip * si / (qi(8) * dq);
        let di = match &next {
            Some(dn) if *dn < own => *dn,
            _ => own,
        };
        s[i] = si;
        delta[i] = di;
        next = Some(di);
    }
    let estimates = s.iter().map(|si| (2.0 / rat::to_f64(si) + 2.0).powi(d as i32)).collect();
    Ok(ScaleChain { s, delta, estimates })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationLog {
    pub chart: usize,
    pub color: u32,
    pub incoming: usize,
    pub absorbed_inside_n1: usize,
    pub absorbed_inside_n2: usize,
    pub regions_after: usize,
    pub max_diam_sq: String,
    /// delta_{i+1}^2, absent for the last chart.
    pub diam_bound_sq: Option<String>,
    pub diam_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Family {
    pub color: u32,
    pub regions: Vec<RegionJson>,
    pub pairwise_disjoint: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Coverage {
    pub resolution: u64,
    pub points: u64,
    pub covered: u64,
    pub fraction: f64,
    pub first_uncovered: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverPlan {
    pub d: usize,
    pub charts: Vec<ChartJson>,
    pub scales: Vec<ScaleEntry>,
    pub families: Vec<Family>,
    pub log: Vec<GenerationLog>,
    pub coverage: Coverage,
    pub disjoint: bool,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct TorusOptions {
    pub resolution: u64,
    pub cube_budget: u64,
}

impl TorusOptions {
    pub fn for_dim(d: usize) -> TorusOptions {
        TorusOptions { resolution: default_resolution(d), cube_budget: DEFAULT_CUBE_BUDGET }
    }
}

/// Cubes at scale s meeting the open unit ball.
fn ball_cubes(d: usize, s: Q) -> Result<Vec<CubeId>> {
    let w = QBox::new(vec![qi(-1); d], vec![qi(1); d])?;
    let origin = QBox { lo: vec![rat::zero(); d], hi: vec![rat::zero(); d] };
    Ok(cubes_in(d, s, &w, false)?.into_iter().filter(|c| c.to_box().euclid_dist_sq(&origin) < rat::one()).collect())
}

fn cube_label(chart: usize, c: &CubeId) -> String {
    let k: Vec<String> = c.k.iter().map(|v| v.to_string()).collect();
    format!("chart{}:k=({})", chart + 1, k.join(","))
}

pub fn torus_cover(d: usize, charts: &[Chart], opts: &TorusOptions) -> Result<CoverPlan> {
    check_dim(d)?;
    if charts.iter().any(|c| c.offset.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: charts[0].offset.len() });
    }
    if opts.resolution == 0 {
        return Err(Error::InvalidArgument("grid resolution must be positive".into()));
    }
    if let Some(c) = charts.iter().find(|c| c.lipschitz >= q(1, 2)) {
        return Err(Error::InvalidArgument(format!(
            "chart scale {} does not embed the unit ball (needs < 1/2)",
            rat::fmt(&c.lipschitz)
        )));
    }
    let res = opts.resolution;
    let (missed, first) = uncovered_by_charts(charts, d, res);
    if missed > 0 {
        return Err(Error::ChartsDoNotCover(format!(
            "{missed} of {} grid points outside every chart, first at ({})",
            res.pow(d as u32),
            rat::fmt_vec(&first.unwrap_or_default()).join(", ")
        )));
    }
    let chain = scale_chain(charts, d)?;
    let total: f64 = chain.estimates.iter().sum();
    if total > opts.cube_budget as f64 {
        let per: Vec<String> = (0..charts.len())
            .map(|i| format!("chart {}: s = {}, ~{:.3e} cubes", i + 1, rat::fmt(&chain.s[i]), chain.estimates[i]))
            .collect();
        return Err(Error::Budget(format!(
            "scale chain needs ~{total:.3e} cubes, budget {}; {}",
            opts.cube_budget,
            per.join("; ")
        )));
    }

    let scales = (0..charts.len())
        .map(|i| ScaleEntry {
            chart: i + 1,
            s: rat::fmt(&chain.s[i]),
            delta: rat::fmt(&chain.delta[i]),
            cubes_estimate: chain.estimates[i],
        })
        .collect();
    let cubes: Vec<Vec<CubeId>> = chain.s.iter().map(|s| ball_cubes(d, *s)).collect::<Result<_>>()?;
    let mut families = Vec::new();
    let mut log = Vec::new();
    let mut all_boxes: Vec<QBox> = Vec::new();
    let mut disjoint = true;
    let mut diam_ok_all = true;
    for color in 1..=d as u32 + 1 {
        let mut regions: Vec<Region> = Vec::new();
        for (i, chart) in charts.iter().enumerate() {
            let incoming: Vec<Incoming> = cubes[i]
                .iter()
                .filter(|c| c.color() == color)
                .map(|c| {
                    let (n1, n2) = neighborhoods(c);
                    Incoming {
                        cube: chart.image(&c.to_box()),
                        n1: chart.image(&n1),
                        n2: chart.image(&n2),
                        label: cube_label(i, c),
                    }
                })
                .collect();
            let out = merge_generation(Space::Torus, &regions, &incoming)?;
            let bound = chain.delta.get(i + 1).map(|dn| dn * dn);
            let diam_ok = bound.map_or(true, |b| out.max_diam_sq < b);
            diam_ok_all &= diam_ok;
            log.push(GenerationLog {
                chart: i + 1,
                color,
                incoming: incoming.len(),
                absorbed_inside_n1: out.log.iter().map(|e| e.absorbed_inside_n1).sum(),
                absorbed_inside_n2: out.log.iter().map(|e| e.absorbed_inside_n2).sum(),
                regions_after: out.regions.len(),
                max_diam_sq: rat::fmt(&out.max_diam_sq),
                diam_bound_sq: bound.map(|b| rat::fmt(&b)),
                diam_ok,
            });
            regions = out.regions;
        }
        let ok = super::boxes::first_overlap(&regions, Space::Torus).is_none();
        disjoint &= ok;
        all_boxes.extend(regions.iter().flat_map(|r| r.boxes.iter().cloned()));
        families.push(Family { color, regions: regions.iter().map(|r| r.to_json()).collect(), pairwise_disjoint: ok });
    }

    let coverage = grid_coverage(&all_boxes, d, res);
    let pass = disjoint && diam_ok_all && coverage.covered == coverage.points && families.len() == d + 1;
    Ok(CoverPlan {
        d,
        charts: charts.iter().map(|c| c.to_json()).collect(),
        scales,
        families,
        log,
        coverage,
        disjoint,
        pass,
    })
}

/// Fraction of the grid {i/res}^d lying in some box (mod Z^d).
pub fn grid_coverage(boxes: &[QBox], d: usize, res: u64) -> Coverage {
    let index = SweepIndex::new(boxes, Space::Torus);
    let points = res.pow(d as u32);
    let mut covered = 0;
    let mut first = None;
    for idx in 0..points {
        let p = grid_point(idx, d, res);
        let pt = QBox { lo: p.clone(), hi: p.clone() };
        if index.candidates(&pt).into_iter().any(|j| boxes[j].contains_point(&p, Space::Torus)) {
            covered += 1;
        } else if first.is_none() {
            first = Some(rat::fmt_vec(&p));
        }
    }
    Coverage { resolution: res, points, covered, fraction: covered as f64 / points as f64, first_uncovered: first }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arcs() -> Vec<Chart> {
        vec![
            Chart { offset: vec![q(1, 4)], lipschitz: q(3, 8) },
            Chart { offset: vec![q(3, 4)], lipschitz: q(3, 8) },
        ]
    }

    #[test]
    fn circle_with_two_arcs() {
        let mut opts = TorusOptions::for_dim(1);
        opts.resolution = 10_000;
        let plan = torus_cover(1, &arcs(), &opts).unwrap();
        assert_eq!(plan.families.len(), 2);
        assert_eq!(plan.scales[0].s, "1/64");
        assert_eq!(plan.scales[1].s, "1/4");
        assert!(plan.disjoint);
        assert_eq!(plan.coverage.covered, plan.coverage.points);
        assert!(plan.log.iter().all(|g| g.diam_ok));
        assert!(plan.pass);
    }

    #[test]
    fn single_chart_fails_to_cover() {
        let c = vec![Chart { offset: vec![qi(0), qi(0)], lipschitz: q(3, 8) }];
        let opts = TorusOptions { resolution: 64, cube_budget: DEFAULT_CUBE_BUDGET };
        assert!(matches!(torus_cover(2, &c, &opts), Err(Error::ChartsDoNotCover(_))));
    }

    #[test]
    fn four_square_charts_exceed_budget() {
        let c: Vec<Chart> = [(1, 1), (3, 1), (1, 3), (3, 3)]
            .iter()
            .map(|(a, b)| Chart { offset: vec![q(*a, 4), q(*b, 4)], lipschitz: q(3, 8) })
            .collect();
        let chain = scale_chain(&c, 2).unwrap();
        assert_eq!(rat::fmt_vec(&chain.s), vec!["1/131072", "1/4096", "1/128", "1/4"]);
        let opts = TorusOptions { resolution: 64, cube_budget: DEFAULT_CUBE_BUDGET };
        assert!(matches!(torus_cover(2, &c, &opts), Err(Error::Budget(_))));
    }

    #[test]
    fn torus_distance() {
        assert_eq!(torus_dist_sq(&[q(1, 10)], &[q(9, 10)]), q(1, 25));
        assert_eq!(default_resolution(2), 512);
        assert_eq!(default_resolution(3), 215);
    }
}
