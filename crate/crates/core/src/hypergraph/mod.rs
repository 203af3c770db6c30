//! Sum-of-two-progression hyperedges, colorings and exact cardinalities.

pub mod canonical;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::gcd;

/// `{start + j*diff : 0 <= j < len}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApSpec {
    pub start: i64,
    pub diff: u64,
    pub len: u64,
}

impl ApSpec {
    pub fn elements(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len).map(move |j| self.start + (j * self.diff) as i64)
    }
}

#[derive(Deserialize)]
struct RawEdge {
    d1: u64,
    l1: u64,
    d2: u64,
    l2: u64,
}

/// The base set `{j1*d1 + j2*d2 : j1 < l1, j2 < l2}`; translates are `a + E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawEdge")]
pub struct SumEdge {
    pub d1: u64,
    pub l1: u64,
    pub d2: u64,
    pub l2: u64,
}

impl TryFrom<RawEdge> for SumEdge {
    type Error = Error;
    fn try_from(r: RawEdge) -> Result<Self> {
        SumEdge::new(r.d1, r.l1, r.d2, r.l2)
    }
}

impl SumEdge {
    pub fn new(d1: u64, l1: u64, d2: u64, l2: u64) -> Result<Self> {
        if d1 == 0 || l1 == 0 || d2 == 0 || l2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "edge parameters must be positive: ({d1}, {l1}, {d2}, {l2})"
            )));
        }
        Ok(SumEdge { d1, l1, d2, l2 })
    }

    /// Largest element, `(l1-1)*d1 + (l2-1)*d2`.
    pub fn span(&self) -> u64 {
        (self.l1 - 1) * self.d1 + (self.l2 - 1) * self.d2
    }

    pub fn first(&self) -> ApSpec {
        ApSpec { start: 0, diff: self.d1, len: self.l1 }
    }

    pub fn second(&self) -> ApSpec {
        ApSpec { start: 0, diff: self.d2, len: self.l2 }
    }

    /// Every representation `j1*d1 + j2*d2` is unique.
    pub fn is_collision_free(&self) -> bool {
        let g = gcd(self.d1, self.d2);
        self.l1 <= self.d2 / g || self.l2 <= self.d1 / g
    }
}

impl std::fmt::Display for SumEdge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}, {})", self.d1, self.l1, self.d2, self.l2)
    }
}

/// Sorted distinct elements of the base set.
pub fn edge_elements(e: &SumEdge) -> Vec<u64> {
    let span = e.span() as usize;
    let mut seen = vec![false; span + 1];
    for j2 in 0..e.l2 {
        for j1 in 0..e.l1 {
            seen[(j1 * e.d1 + j2 * e.d2) as usize] = true;
        }
    }
    seen.iter()
        .enumerate()
        .filter_map(|(x, &s)| s.then_some(x as u64))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cardinality {
    pub value: u64,
    pub collision_free: bool,
}

/// Exact `|E|` in constant time.
///
/// With `g = gcd`, `d1' = d1/g`, `d2' = d2/g`: collisions happen only when
/// `l1 > d2'` and `l2 > d1'`. Then rows `j2 ≡ r (mod d1')` merge into a
/// single progression of step `d1`, and counting those gives the formula below.
pub fn edge_cardinality(e: &SumEdge) -> Cardinality {
    let g = gcd(e.d1, e.d2);
    let (p1, p2) = (e.d1 / g, e.d2 / g);
    if e.is_collision_free() {
        return Cardinality { value: e.l1 * e.l2, collision_free: true };
    }
    // residue class r < p1 holds T_r = ceil((l2 - r)/p1) rows, covering (T_r - 1)*p2 + l1 points
    let q = e.l2 / p1;
    let rho = e.l2 % p1;
    let value = rho * (q * p2 + e.l1) + (p1 - rho) * ((q - 1) * p2 + e.l1);
    Cardinality { value, collision_free: false }
}

/// A ±1 coloring of `[1, n]`; `values[i]` is the color of `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawColoring")]
pub struct Coloring {
    n: usize,
    values: Vec<i8>,
}

#[derive(Deserialize)]
struct RawColoring {
    n: usize,
    values: Vec<i8>,
}

impl TryFrom<RawColoring> for Coloring {
    type Error = Error;
    fn try_from(r: RawColoring) -> Result<Self> {
        if r.n != r.values.len() {
            return Err(Error::InvalidArgument(format!(
                "coloring length {} does not match n = {}",
                r.values.len(),
                r.n
            )));
        }
        Coloring::new(r.values)
    }
}

impl Coloring {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty coloring".into()));
        }
        if let Some(v) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidArgument(format!("color {v} is not ±1")));
        }
        Ok(Coloring { n: values.len(), values })
    }

    pub fn ones(n: usize) -> Self {
        Coloring { n, values: vec![1; n] }
    }

    /// `chi(x) = (-1)^x`.
    pub fn alternating(n: usize) -> Self {
        Coloring { n, values: (1..=n).map(|x| if x % 2 == 0 { 1 } else { -1 }).collect() }
    }

    /// Alternating blocks of length `b`, starting with `+1`.
    pub fn blocks(n: usize, b: usize) -> Self {
        let b = b.max(1);
        Coloring {
            n,
            values: (0..n).map(|i| if (i / b) % 2 == 0 { 1 } else { -1 }).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Coloring {
            n,
            values: (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// Color of `z`, or 0 outside `[1, n]`.
    pub fn at(&self, z: i64) -> i64 {
        if z >= 1 && z as usize <= self.n {
            self.values[z as usize - 1] as i64
        } else {
            0
        }
    }

    pub fn flip(&mut self, x: usize) {
        self.values[x - 1] = -self.values[x - 1];
    }

    /// Bit `x - 1` is set iff `chi(x) = -1`.
    pub fn negative_mask(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.n.div_ceil(64)];
        for (i, &v) in self.values.iter().enumerate() {
            if v < 0 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        words
    }
}

/// `chi(a + E)` for one translate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslatedEdgeValue {
    pub edge: SumEdge,
    pub offset: i64,
    pub value: i64,
}

/// `sum over x in E of chi(a + x)`.
pub fn color_value(chi: &Coloring, e: &SumEdge, a: i64) -> i64 {
    edge_elements(e).iter().map(|&x| chi.at(a + x as i64)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn brute(e: &SumEdge) -> BTreeSet<u64> {
        let mut s = BTreeSet::new();
        for j1 in 0..e.l1 {
            for j2 in 0..e.l2 {
                s.insert(j1 * e.d1 + j2 * e.d2);
            }
        }
        s
    }

    #[test]
    fn cardinality_matches_enumeration_exhaustive() {
        for d1 in 1..=9 {
            for d2 in 1..=9 {
                for l1 in 1..=9 {
                    for l2 in 1..=9 {
                        let e = SumEdge::new(d1, l1, d2, l2).unwrap();
                        let b = brute(&e);
                        let c = edge_cardinality(&e);
                        assert_eq!(c.value as usize, b.len(), "{e}");
                        assert_eq!(c.collision_free, b.len() as u64 == l1 * l2, "{e}");
                        assert_eq!(edge_elements(&e), b.into_iter().collect::<Vec<_>>());
                    }
                }
            }
        }
    }

    #[test]
    fn edge_validation_and_serde() {
        assert!(SumEdge::new(0, 1, 1, 1).is_err());
        let e: SumEdge = serde_json::from_str(r#"{"d1":2,"l1":4,"d2":4,"l2":2}"#).unwrap();
        assert_eq!(edge_elements(&e), vec![0, 2, 4, 6, 8, 10]);
        assert!(serde_json::from_str::<SumEdge>(r#"{"d1":0,"l1":4,"d2":4,"l2":2}"#).is_err());
        let back = serde_json::to_string(&e).unwrap();
        assert_eq!(back, r#"{"d1":2,"l1":4,"d2":4,"l2":2}"#);
    }

    #[test]
    fn coloring_validation() {
        assert!(Coloring::new(vec![1, 0, -1]).is_err());
        assert!(serde_json::from_str::<Coloring>(r#"{"n":3,"values":[1,-1]}"#).is_err());
        let c: Coloring = serde_json::from_str(r#"{"n":3,"values":[1,-1,1]}"#).unwrap();
        assert_eq!(c.at(0), 0);
        assert_eq!(c.at(2), -1);
        assert_eq!(c.at(4), 0);
        assert_eq!(Coloring::alternating(4).values(), &[-1, 1, -1, 1]);
        assert_eq!(Coloring::blocks(5, 2).values(), &[1, 1, -1, -1, 1]);
    }

    #[test]
    fn color_value_direct() {
        let chi = Coloring::new(vec![1, 1, -1, 1, -1]).unwrap();
        let e = SumEdge::new(1, 2, 3, 2).unwrap(); // {0,1,3,4}
        assert_eq!(color_value(&chi, &e, 1), 1 + 1 + 1 - 1);
        assert_eq!(color_value(&chi, &e, -3), 1);
    }
}
