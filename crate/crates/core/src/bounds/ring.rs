//! Graded commutative rings over Z/2 given by a basis and a multiplication table, and the
//! cup-length by exhaustive search over basis monomials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonzero product of two basis elements: basis[a] * basis[b] = sum of basis[result].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Product {
    pub a: usize,
    pub b: usize,
    pub result: Vec<usize>,
}

/// Reduced cohomology: the unit is implicit, every basis element has positive degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingPresentation {
    pub degrees: Vec<u32>,
    pub products: Vec<Product>,
    pub top_degree: u32,
}

pub const MAX_BASIS: usize = 64;

/// Elements are bit sets of basis indices.
pub struct Ring {
    degrees: Vec<u32>,
    table: Vec<Vec<u64>>,
    top: u32,
}

impl Ring {
    pub fn new(p: &RingPresentation) -> Result<Ring> {
        let n = p.degrees.len();
        if n > MAX_BASIS {
            return Err(Error::InvalidArgument(format!("basis of size {n} exceeds {MAX_BASIS}")));
        }
        if let Some(i) = p.degrees.iter().position(|&d| d == 0 || d > p.top_degree) {
            return Err(Error::Schema(format!("basis element {i} has degree outside 1..={}", p.top_degree)));
        }
        let mut table = vec![vec![0u64; n]; n];
        let mut set = vec![vec![false; n]; n];
        for pr in &p.products {
            if pr.a >= n || pr.b >= n || pr.result.iter().any(|&r| r >= n) {
                return Err(Error::Schema(format!("product {}*{} refers to a missing basis element", pr.a, pr.b)));
            }
            let mut v = 0u64;
            for &r in &pr.result {
                if p.degrees[r] != p.degrees[pr.a] + p.degrees[pr.b] {
                    return Err(Error::Schema(format!("product {}*{} is not graded", pr.a, pr.b)));
                }
                v ^= 1 << r;
            }
            for (i, j) in [(pr.a, pr.b), (pr.b, pr.a)] {
                if set[i][j] && table[i][j] != v {
                    return Err(Error::Schema(format!("products {i}*{j} and {j}*{i} disagree")));
                }
                table[i][j] = v;
                set[i][j] = true;
            }
        }
        let ring = Ring { degrees: p.degrees.clone(), table, top: p.top_degree };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let l = ring.mul(ring.mul(1 << i, 1 << j), 1 << k);
                    let r = ring.mul(1 << i, ring.mul(1 << j, 1 << k));
                    if l != r {
                        return Err(Error::Schema(format!("multiplication is not associative on ({i}, {j}, {k})")));
                    }
                }
            }
        }
        Ok(ring)
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        let mut out = 0;
        let mut xs = x;
        while xs != 0 {
            let i = xs.trailing_zeros() as usize;
            xs &= xs - 1;
            let mut ys = y;
            while ys != 0 {
                let j = ys.trailing_zeros() as usize;
                ys &= ys - 1;
                out ^= self.table[i][j];
            }
        }
        out
    }

    /// Longest nonzero product of basis elements, with one witness.
    pub fn cup_length(&self) -> (usize, Vec<usize>) {
        let mut best = (0, Vec::new());
        let mut stack = Vec::new();
        for i in 0..self.dim() {
            stack.clear();
            stack.push(i);
            self.extend(1 << i, self.degrees[i], &mut stack, &mut best);
        }
        best
    }

    fn extend(&self, v: u64, deg: u32, stack: &mut Vec<usize>, best: &mut (usize, Vec<usize>)) {
        if stack.len() > best.0 {
            *best = (stack.len(), stack.clone());
        }
        let last = *stack.last().unwrap();
        for j in last..self.dim() {
            if deg + self.degrees[j] > self.top {
                continue;
            }
            let w = self.mul(v, 1 << j);
            if w != 0 {
                stack.push(j);
                self.extend(w, deg + self.degrees[j], stack, best);
                stack.pop();
            }
        }
    }
}

pub fn cup_length(p: &RingPresentation) -> Result<usize> {
    Ok(Ring::new(p)?.cup_length().0)
}

impl RingPresentation {
    /// H*(S^n; Z/2).
    pub fn sphere(n: u32) -> RingPresentation {
        RingPresentation { degrees: vec![n], products: vec![], top_degree: n }
    }

    /// H*(T^n; Z/2): exterior algebra on n degree-one classes, basis = nonempty subsets.
    pub fn torus(n: u32) -> Result<RingPresentation> {
        if n == 0 || n > 6 {
            return Err(Error::InvalidArgument("torus ring is built for 1 <= n <= 6".into()));
        }
        let subsets: Vec<u32> = (1u32..(1 << n)).collect();
        let index = |s: u32| (s - 1) as usize;
        let degrees = subsets.iter().map(|s| s.count_ones()).collect();
        let mut products = Vec::new();
        for &a in &subsets {
            for &b in &subsets {
                if a & b == 0 && a <= b {
                    products.push(Product { a: index(a), b: index(b), result: vec![index(a | b)] });
                }
            }
        }
        Ok(RingPresentation { degrees, products, top_degree: n })
    }

    /// H*(RP^n; Z/2) = Z/2[a]/(a^{n+1}).
    pub fn real_projective(n: u32) -> RingPresentation {
        let mut products = Vec::new();
        for i in 1..=n {
            for j in i..=n {
                if i + j <= n {
                    products.push(Product { a: (i - 1) as usize, b: (j - 1) as usize, result: vec![(i + j - 1) as usize] });
                }
            }
        }
        RingPresentation { degrees: (1..=n).collect(), products, top_degree: n }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rings() {
        assert_eq!(cup_length(&RingPresentation::sphere(5)).unwrap(), 1);
        assert_eq!(cup_length(&RingPresentation::torus(2).unwrap()).unwrap(), 2);
        assert_eq!(cup_length(&RingPresentation::torus(3).unwrap()).unwrap(), 3);
        assert_eq!(cup_length(&RingPresentation::real_projective(3)).unwrap(), 3);
    }

    #[test]
    fn ungraded_table_rejected() {
        let p = RingPresentation {
            degrees: vec![1, 1],
            products: vec![Product { a: 0, b: 0, result: vec![1] }],
            top_degree: 2,
        };
        assert!(matches!(Ring::new(&p), Err(Error::Schema(_))));
    }
}
