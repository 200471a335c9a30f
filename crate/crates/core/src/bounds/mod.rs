//! Bounds along the chain cl + 1 <= cat <= B <= C <= d + 1, the 3-manifold table and the
//! structural rules for products, spherisations, quotients and connected sums.

pub mod ring;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use ring::{cup_length, Product, Ring, RingPresentation};

pub const CHAIN: &str = "cl(M)+1 <= cat(M) <= B(M)";
pub const ROUGH: &str = "B(M) <= d+1";
pub const CONNECTED: &str = "B(M) <= d/(p+1)+1 for p-connected M, d != 4";
pub const MAIN: &str = "B(M) <= C(M,xi) <= dim M + 1";
pub const TABLE: &str = "B and C of closed 3-manifolds: 2 for S^3 (C: tight), 3 for #k(S^2xS^1) and overtwisted S^3, 4 otherwise";
pub const CONNECTED_SUM: &str = "C(M1#M2) <= max{C(M1), C(M2)}";
pub const SPHERISATION: &str = "C(S*N) <= 2 min{B(N), dim N}";
pub const PRODUCT: &str = "C(M x Sigma) = 2n+2 when cl(M) = dim M";
pub const QUOTIENT: &str = "cat(M) = dim M + 1 for quotients of homotopy spheres";
pub const STANDARD_SPHERE: &str = "C(S^{2n+1}, xi_0) = 2";
pub const OVERTWISTED_SPHERE: &str = "C(S^{2n+1}, xi) >= 3 for overtwisted xi";
pub const KUNNETH: &str = "cl(M x N) = cl(M) + cl(N) over Z/2";
pub const SUM_CL: &str = "cl(M1#M2) = max{cl(M1), cl(M2)}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactTag {
    /// The standard structure (for spheres; on S^3 the same as tight).
    Standard,
    Tight,
    Overtwisted,
    #[default]
    Unspecified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ManifoldClass {
    S3,
    #[serde(rename = "connected_sum_S2xS1")]
    ConnectedSumS2xS1 {
        k: u32,
    },
    #[serde(rename = "other_closed_oriented_3mfd")]
    OtherClosedOriented3,
    Torus {
        n: u32,
    },
    /// M x Sigma with Sigma a closed oriented surface of genus >= 1.
    ProductWithSurface {
        factor: Box<ManifoldDescriptor>,
        genus: u32,
    },
    Sphere {
        n: u32,
    },
    SpherisationOf {
        base: Box<ManifoldDescriptor>,
    },
    QuotientOfHomotopySphere {
        dim: u32,
    },
    ConnectedSum {
        parts: Vec<ManifoldDescriptor>,
    },
    Generic {
        dim: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldDescriptor {
    #[serde(flatten)]
    pub class: ManifoldClass,
    #[serde(default)]
    pub contact: ContactTag,
    /// M is p-connected (pi_i = 0 for 1 <= i <= p).
    #[serde(default)]
    pub p_connectivity: Option<u32>,
    /// Known cup-length over Z/2, used when the class does not determine it.
    #[serde(default)]
    pub cup_length: Option<u32>,
    #[serde(default)]
    pub ring: Option<RingPresentation>,
}

impl ManifoldDescriptor {
    pub fn new(class: ManifoldClass, contact: ContactTag) -> Self {
        ManifoldDescriptor { class, contact, p_connectivity: None, cup_length: None, ring: None }
    }

    pub fn dimension(&self) -> Result<u32> {
        use ManifoldClass::*;
        Ok(match &self.class {
            S3 | ConnectedSumS2xS1 { .. } | OtherClosedOriented3 => 3,
            Torus { n } | Sphere { n } => *n,
            ProductWithSurface { factor, genus } => {
                if *genus == 0 {
                    return Err(Error::Precondition("the surface factor must have genus >= 1".into()));
                }
                factor.dimension()? + 2
            }
            SpherisationOf { base } => 2 * base.dimension()? - 1,
            QuotientOfHomotopySphere { dim } | Generic { dim } => *dim,
            ConnectedSum { parts } => {
                let d = parts.first().ok_or_else(|| Error::Precondition("empty connected sum".into()))?.dimension()?;
                for p in parts {
                    if p.dimension()? != d {
                        return Err(Error::Precondition("connected sum of manifolds of different dimensions".into()));
                    }
                }
                d
            }
        })
        .and_then(|d| if d == 0 { Err(Error::Precondition("dimension must be positive".into())) } else { Ok(d) })
    }

    fn is_sphere(&self) -> bool {
        matches!(self.class, ManifoldClass::S3 | ManifoldClass::Sphere { .. } | ManifoldClass::ConnectedSumS2xS1 { k: 0 })
    }

    /// Reduces a 3-dimensional descriptor to a row of the 3-manifold table, if it has one.
    fn three_class(&self) -> Option<ThreeClass> {
        use ManifoldClass::*;
        match &self.class {
            S3 | Sphere { n: 3 } | ConnectedSumS2xS1 { k: 0 } => Some(ThreeClass::Sphere),
            ConnectedSumS2xS1 { k } => Some(ThreeClass::SumS2xS1(*k)),
            OtherClosedOriented3 | Torus { n: 3 } | QuotientOfHomotopySphere { dim: 3 } => Some(ThreeClass::Other),
            SpherisationOf { base } if base.dimension().ok() == Some(2) => Some(ThreeClass::Other),
            ConnectedSum { parts } => {
                let mut k = 0;
                for p in parts {
                    match p.three_class()? {
                        ThreeClass::Sphere => {}
                        ThreeClass::SumS2xS1(j) => k += j,
                        ThreeClass::Other => return Some(ThreeClass::Other),
                    }
                }
                Some(if k == 0 { ThreeClass::Sphere } else { ThreeClass::SumS2xS1(k) })
            }
            _ => None,
        }
    }

    /// Cup-length over Z/2 when it is known, with the rules used.
    pub fn known_cup_length(&self) -> Result<Option<(u32, Vec<String>)>> {
        use ManifoldClass::*;
        if let Some(r) = &self.ring {
            return Ok(Some((cup_length(r)? as u32, vec!["cup-length by exhaustive search".into()])));
        }
        if let Some(c) = self.cup_length {
            return Ok(Some((c, vec!["cup-length supplied".into()])));
        }
        Ok(match &self.class {
            S3 | Sphere { .. } | QuotientOfHomotopySphere { .. } if self.is_sphere() => Some((1, vec![])),
            ConnectedSumS2xS1 { k } => Some((if *k == 0 { 1 } else { 2 }, vec![])),
            Torus { n } => Some((*n, vec![])),
            ProductWithSurface { factor, .. } => factor.known_cup_length()?.map(|(c, mut r)| {
                r.push(KUNNETH.into());
                (c + 2, r)
            }),
            SpherisationOf { base } => match base.class {
                // S*S^2 = RP^3 and S*T^2 = T^3
                Sphere { n: 2 } => Some((3, vec![])),
                Torus { n: 2 } => Some((3, vec![])),
                _ => None,
            },
            ConnectedSum { parts } => {
                let mut best = 0;
                let mut rules = vec![SUM_CL.to_string()];
                for p in parts {
                    match p.known_cup_length()? {
                        Some((c, r)) => {
                            best = best.max(c);
                            rules.extend(r);
                        }
                        None => return Ok(None),
                    }
                }
                Some((best, rules))
            }
            _ => None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ThreeClass {
    Sphere,
    SumS2xS1(u32),
    Other,
}

/// An integer interval with the rules that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub lower: u32,
    pub upper: u32,
    pub citations: Vec<String>,
}

impl BoundResult {
    fn new(lower: u32, upper: u32) -> Self {
        BoundResult { lower, upper, citations: Vec::new() }
    }

    pub fn exact(&self) -> Option<u32> {
        (self.lower == self.upper).then_some(self.lower)
    }

    fn raise(&mut self, v: u32, why: &str) {
        if v > self.lower {
            self.lower = v;
        }
        self.cite(why);
    }

    fn cap(&mut self, v: u32, why: &str) {
        if v < self.upper {
            self.upper = v;
        }
        self.cite(why);
    }

    fn cite(&mut self, why: &str) {
        if !self.citations.iter().any(|c| c == why) {
            self.citations.push(why.to_string());
        }
    }

    fn check(self, what: &str) -> Result<Self> {
        if self.lower > self.upper {
            return Err(Error::Degenerate(format!(
                "contradictory rules for {what}: lower {} > upper {} ({:?})",
                self.lower, self.upper, self.citations
            )));
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryBounds {
    pub cup_length: Option<u32>,
    pub cat: BoundResult,
    pub b: BoundResult,
}

/// Bounds on cat(M) and B(M). An explicit `cl` overrides the descriptor's cup-length.
pub fn category_bounds(m: &ManifoldDescriptor, cl: Option<u32>) -> Result<CategoryBounds> {
    let d = m.dimension()?;
    let known = match cl {
        Some(c) => Some((c, vec!["cup-length supplied".to_string()])),
        None => m.known_cup_length()?,
    };
    let mut cat = BoundResult::new(1, d + 1);
    let mut b = BoundResult::new(1, d + 1);
    cat.cite(ROUGH);
    b.cite(ROUGH);
    if let Some((c, rules)) = &known {
        for r in rules {
            cat.cite(r);
        }
        cat.raise(c + 1, CHAIN);
    }
    let p = match (&m.class, m.p_connectivity) {
        (_, Some(p)) => Some(p),
        _ if m.is_sphere() => Some(d - 1),
        _ => None,
    };
    if let Some(p) = p {
        if d != 4 {
            b.cap(d / (p + 1) + 1, CONNECTED);
        }
    }
    if let ManifoldClass::QuotientOfHomotopySphere { .. } = m.class {
        cat.raise(d + 1, QUOTIENT);
    }
    if d == 3 {
        if let Some(t) = m.three_class() {
            let v = match t {
                ThreeClass::Sphere => 2,
                ThreeClass::SumS2xS1(_) => 3,
                ThreeClass::Other => 4,
            };
            b.raise(v, TABLE);
            b.cap(v, TABLE);
        }
    }
    // cat <= B
    b.raise(cat.lower, CHAIN);
    cat.cap(b.upper, CHAIN);
    Ok(CategoryBounds { cup_length: known.map(|k| k.0), cat: cat.check("cat")?, b: b.check("B")? })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeManifoldValues {
    #[serde(rename = "B")]
    pub b: u32,
    #[serde(rename = "C")]
    pub c: u32,
}

/// Exact B and C of a closed connected oriented 3-manifold.
pub fn three_manifold_values(m: &ManifoldDescriptor) -> Result<ThreeManifoldValues> {
    if m.dimension()? != 3 {
        return Err(Error::Precondition("the table covers closed 3-manifolds only".into()));
    }
    let t = m.three_class().ok_or_else(|| Error::Precondition("3-manifold class not determined by the descriptor".into()))?;
    Ok(match t {
        ThreeClass::Sphere => match m.contact {
            ContactTag::Tight | ContactTag::Standard => ThreeManifoldValues { b: 2, c: 2 },
            ContactTag::Overtwisted => ThreeManifoldValues { b: 2, c: 3 },
            ContactTag::Unspecified => {
                return Err(Error::Precondition("C(S^3, xi) depends on whether xi is tight; contact tag missing".into()))
            }
        },
        ThreeClass::SumS2xS1(_) => ThreeManifoldValues { b: 3, c: 3 },
        ThreeClass::Other => ThreeManifoldValues { b: 4, c: 4 },
    })
}

/// Bounds on the contact covering number C(M, xi).
pub fn covering_number_bounds(m: &ManifoldDescriptor) -> Result<BoundResult> {
    let d = m.dimension()?;
    let cb = category_bounds(m, None)?;
    let mut c = BoundResult::new(1, d + 1);
    c.cite(MAIN);
    for r in &cb.b.citations {
        c.cite(r);
    }
    c.raise(cb.b.lower, MAIN);
    if d == 3 {
        if let Ok(v) = three_manifold_values(m) {
            c.raise(v.c, TABLE);
            c.cap(v.c, TABLE);
        }
    }
    match &m.class {
        ManifoldClass::Sphere { n } if n % 2 == 1 => match m.contact {
            ContactTag::Standard => c.cap(2, STANDARD_SPHERE),
            ContactTag::Tight if *n == 3 => c.cap(2, STANDARD_SPHERE),
            ContactTag::Overtwisted => c.raise(3, OVERTWISTED_SPHERE),
            _ => {}
        },
        ManifoldClass::S3 => match m.contact {
            ContactTag::Standard | ContactTag::Tight => c.cap(2, STANDARD_SPHERE),
            ContactTag::Overtwisted => c.raise(3, OVERTWISTED_SPHERE),
            ContactTag::Unspecified => {}
        },
        ManifoldClass::ProductWithSurface { factor, .. } => {
            if let Some((cl, _)) = factor.known_cup_length()? {
                if cl == factor.dimension()? {
                    c.raise(d + 1, PRODUCT);
                }
            }
        }
        ManifoldClass::Torus { n } if n % 2 == 1 => {
            if cb.cup_length == Some(*n) {
                c.raise(d + 1, PRODUCT);
            }
        }
        ManifoldClass::SpherisationOf { base } => {
            let nb = category_bounds(base, None)?;
            let n = base.dimension()?;
            c.cap(2 * nb.b.upper.min(n), SPHERISATION);
        }
        ManifoldClass::QuotientOfHomotopySphere { .. } => c.raise(d + 1, QUOTIENT),
        ManifoldClass::ConnectedSum { parts } => {
            let mut max_upper = 0;
            for p in parts {
                max_upper = max_upper.max(covering_number_bounds(p)?.upper);
            }
            c.cap(max_upper, CONNECTED_SUM);
        }
        _ => {}
    }
    c.check("C")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub dimension: u32,
    pub cup_length: Option<u32>,
    pub cat: BoundResult,
    #[serde(rename = "B")]
    pub b: BoundResult,
    #[serde(rename = "C")]
    pub c: BoundResult,
    pub three_manifold: Option<ThreeManifoldValues>,
}

pub fn bounds_report(m: &ManifoldDescriptor) -> Result<BoundsReport> {
    let mut cb = category_bounds(m, None)?;
    let d = m.dimension()?;
    let c = covering_number_bounds(m)?;
    // cat <= B <= C
    cb.b.cap(c.upper, MAIN);
    cb.cat.cap(cb.b.upper, CHAIN);
    Ok(BoundsReport {
        dimension: d,
        cup_length: cb.cup_length,
        cat: cb.cat.check("cat")?,
        b: cb.b.check("B")?,
        c,
        three_manifold: if d == 3 { three_manifold_values(m).ok() } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desc(class: ManifoldClass, contact: ContactTag) -> ManifoldDescriptor {
        ManifoldDescriptor::new(class, contact)
    }

    #[test]
    fn connectivity_bound() {
        let mut m = desc(ManifoldClass::Generic { dim: 3 }, ContactTag::Unspecified);
        m.p_connectivity = Some(1);
        assert_eq!(category_bounds(&m, None).unwrap().b.upper, 2);
        let mut m = desc(ManifoldClass::Generic { dim: 7 }, ContactTag::Unspecified);
        m.p_connectivity = Some(1);
        assert_eq!(category_bounds(&m, None).unwrap().b.upper, 4);
        let mut m = desc(ManifoldClass::Generic { dim: 4 }, ContactTag::Unspecified);
        m.p_connectivity = Some(1);
        assert_eq!(category_bounds(&m, None).unwrap().b.upper, 5);
    }

    #[test]
    fn covering_numbers() {
        let t3 = desc(ManifoldClass::Torus { n: 3 }, ContactTag::Unspecified);
        let c = covering_number_bounds(&t3).unwrap();
        assert_eq!((c.lower, c.upper), (4, 4));
        let s = desc(
            ManifoldClass::SpherisationOf { base: Box::new(desc(ManifoldClass::Sphere { n: 2 }, ContactTag::Unspecified)) },
            ContactTag::Unspecified,
        );
        let c = covering_number_bounds(&s).unwrap();
        assert_eq!((c.lower, c.upper), (4, 4));
        let s5 = desc(ManifoldClass::Sphere { n: 5 }, ContactTag::Overtwisted);
        let c = covering_number_bounds(&s5).unwrap();
        assert_eq!((c.lower, c.upper), (3, 6));
    }

    #[test]
    fn three_manifold_table() {
        let v = |c, t| three_manifold_values(&desc(c, t)).unwrap().c;
        assert_eq!(v(ManifoldClass::S3, ContactTag::Tight), 2);
        assert_eq!(v(ManifoldClass::S3, ContactTag::Overtwisted), 3);
        assert_eq!(v(ManifoldClass::ConnectedSumS2xS1 { k: 2 }, ContactTag::Unspecified), 3);
        assert_eq!(v(ManifoldClass::OtherClosedOriented3, ContactTag::Tight), 4);
        assert!(three_manifold_values(&desc(ManifoldClass::S3, ContactTag::Unspecified)).is_err());
    }
}
