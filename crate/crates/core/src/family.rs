//! The special family `E0 = E1 ∪ E2 ∪ E3` of base edges for a given `n`.
//!
//! All comparisons with `sqrt(n)` are done by squaring integers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{edge_cardinality, SumEdge};
use crate::numtheory::{ceil_div, ceil_sqrt, floor_sqrt, gcd, gt_sqrt, lt_sqrt, totatives};

/// Largest first difference in `E1`.
pub const E1_MAX_DELTA: u64 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyConfig {
    pub n: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubFamily {
    E1,
    E2,
    E3,
}

/// Where an `E3` edge came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E3Tag {
    pub k: u32,
    pub b: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyEdge {
    pub subfamily: SubFamily,
    pub edge: SumEdge,
    pub tag: Option<E3Tag>,
}

/// `M(b, k) = (b + 4^k d1 Z) ∩ (2^k sqrt(n), 2^(k+1) sqrt(n) + 4^k d1)`, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MSet {
    pub delta1: u64,
    pub b: u64,
    pub k: u32,
    pub members: Vec<u64>,
}

fn pow4(k: u32) -> u128 {
    1u128 << (2 * k)
}

/// Largest `k` with `4^k d1^2 <= n`, i.e. `floor(log2(sqrt(n)/d1))`.
pub fn k_bar(n: u64, delta1: u64) -> Result<u32> {
    let d = delta1 as u128;
    if delta1 == 0 || d * d > n as u128 {
        return Err(Error::InvalidArgument(format!(
            "delta1 = {delta1} must lie in [1, sqrt({n})]"
        )));
    }
    let mut k = 0u32;
    while pow4(k + 1) * d * d <= n as u128 {
        k += 1;
    }
    Ok(k)
}

/// Exact membership in `M(b, k)` (the residue condition included).
pub fn m_contains(n: u64, delta1: u64, b: u64, k: u32, x: u64) -> bool {
    let step = pow4(k) * delta1 as u128;
    let (x, n) = (x as i128, n as u128);
    (x - b as i128).rem_euclid(step as i128) == 0
        && gt_sqrt(x, pow4(k) * n)
        && lt_sqrt(x - step as i128, pow4(k + 1) * n)
}

pub fn build_m_set(n: u64, delta1: u64, b: u64, k: u32) -> Result<MSet> {
    if delta1 == 0 {
        return Err(Error::DegenerateModulus(0));
    }
    let kb = k_bar(n, delta1)?;
    if k > kb {
        return Err(Error::BadK { k, k_bar: kb, delta1 });
    }
    if b == 0 || b > delta1 {
        return Err(Error::InvalidArgument(format!("b = {b} not in [1, {delta1}]")));
    }
    if gcd(b, delta1) != 1 {
        return Err(Error::NotCoprime { a: b as i64, delta: delta1 });
    }
    let step = pow4(k) * delta1 as u128;
    let x0 = floor_sqrt(pow4(k) * n as u128) + 1;
    let mut x = x0 + (b as u128 + step - x0 % step) % step;
    let mut members = Vec::new();
    while lt_sqrt(x as i128 - step as i128, pow4(k + 1) * n as u128) {
        members.push(x as u64);
        x += step;
    }
    Ok(MSet { delta1, b, k, members })
}

/// `(ceil(2^k sqrt(n)/12), ceil(2^-k sqrt(n)/12))`.
pub fn e3_lengths(n: u64, k: u32) -> (u64, u64) {
    let n = n as u128;
    let l1 = ceil_div(ceil_sqrt(pow4(k) * n), 12);
    let l2 = ceil_div(ceil_sqrt(n), 12 << k);
    (l1 as u64, l2 as u64)
}

pub fn e1_edge(n: u64, delta1: u64) -> SumEdge {
    SumEdge { d1: delta1, l1: n.div_ceil(6 * delta1), d2: 1, l2: 1 }
}

pub fn e2_edge(n: u64, delta1: u64, delta2: u64) -> SumEdge {
    SumEdge {
        d1: delta1,
        l1: n.div_ceil(12 * delta1),
        d2: delta2,
        l2: (delta1 - 1).div_ceil(12),
    }
}

pub fn e3_edge(n: u64, delta1: u64, k: u32, delta2: u64) -> SumEdge {
    let (l1, l2) = e3_lengths(n, k);
    SumEdge { d1: delta1, l1, d2: delta2, l2 }
}

/// Whether `fe` is one of the edges `build_family` would produce, without building it.
pub fn contains(n: u64, fe: &FamilyEdge) -> bool {
    let e = fe.edge;
    let root = floor_sqrt(n as u128) as u64;
    match (fe.subfamily, fe.tag) {
        (SubFamily::E1, None) => (1..=E1_MAX_DELTA).contains(&e.d1) && e == e1_edge(n, e.d1),
        (SubFamily::E2, None) => {
            (E1_MAX_DELTA + 1..=root).contains(&e.d1)
                && (1..e.d1).contains(&e.d2)
                && e == e2_edge(n, e.d1, e.d2)
        }
        (SubFamily::E3, Some(t)) => {
            (1..=root).contains(&e.d1)
                && k_bar(n, e.d1).is_ok_and(|kb| t.k <= kb)
                && (1..=e.d1).contains(&t.b)
                && gcd(t.b, e.d1) == 1
                && m_contains(n, e.d1, t.b, t.k, e.d2)
                && e == e3_edge(n, e.d1, t.k, e.d2)
        }
        _ => false,
    }
}

/// An edge whose lengths had to be shortened to fit in `[1, n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClippedEdge {
    pub original: SumEdge,
    pub clipped: SumEdge,
}

#[derive(Clone, Debug)]
pub struct FamilyE0 {
    pub n: u64,
    pub edges: Vec<FamilyEdge>,
    pub clipped: Vec<ClippedEdge>,
}

impl FamilyE0 {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn of(&self, sub: SubFamily) -> impl Iterator<Item = &FamilyEdge> + '_ {
        self.edges.iter().filter(move |e| e.subfamily == sub)
    }

    pub fn count(&self, sub: SubFamily) -> usize {
        self.of(sub).count()
    }

    pub fn base_edges(&self) -> impl Iterator<Item = &SumEdge> + '_ {
        self.edges.iter().map(|e| &e.edge)
    }
}

fn fit(n: u64, e: SumEdge) -> SumEdge {
    let mut c = e;
    while c.span() > n - 1 && c.l2 > 1 {
        c.l2 -= 1;
    }
    while c.span() > n - 1 && c.l1 > 1 {
        c.l1 -= 1;
    }
    c
}

/// Counts below which the family-size bounds are not expected to hold.
pub const LEMMA_COUNT_MIN_N: u64 = 576;

/// Builds `E0`, checking containment and the `M`-set size bounds as it goes.
///
/// For `n >= LEMMA_COUNT_MIN_N` the family-size bounds are enforced too.
pub fn build_family(cfg: FamilyConfig) -> Result<FamilyE0> {
    let n = cfg.n;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let root = floor_sqrt(n as u128) as u64;
    let mut edges = Vec::new();
    let mut clipped = Vec::new();
    let mut push = |sub: SubFamily, e: SumEdge, tag: Option<E3Tag>| {
        let edge = if e.span() > n - 1 {
            let c = fit(n, e);
            log::warn!("edge {e} does not fit in [1, {n}]; clipped to {c}");
            clipped.push(ClippedEdge { original: e, clipped: c });
            c
        } else {
            e
        };
        edges.push(FamilyEdge { subfamily: sub, edge, tag });
    };

    for d1 in 1..=E1_MAX_DELTA {
        push(SubFamily::E1, e1_edge(n, d1), None);
    }
    for d1 in E1_MAX_DELTA + 1..=root {
        for d2 in 1..d1 {
            push(SubFamily::E2, e2_edge(n, d1, d2), None);
        }
    }
    for d1 in 1..=root {
        let kb = k_bar(n, d1)?;
        for k in 0..=kb {
            let mut union = 0u128;
            for b in totatives(d1) {
                let m = build_m_set(n, d1, b, k)?;
                let size = m.members.len() as u128;
                // (|M| - 1) 2^k d1 <= 3 sqrt(n)
                let lhs = size.saturating_sub(1) * (1u128 << k) * d1 as u128;
                if lhs * lhs > 9 * n as u128 {
                    return Err(Error::invariant(
                        "family",
                        "|M(b,k)| <= 3 * 2^-k * sqrt(n) / delta1 + 1",
                        format!("n = {n}, delta1 = {d1}, b = {b}, k = {k}, |M| = {size}"),
                    ));
                }
                union += size;
                for &d2 in &m.members {
                    push(SubFamily::E3, e3_edge(n, d1, k, d2), Some(E3Tag { k, b }));
                }
            }
            // |M_{d1}(k)| <= 3 * 2^-k * sqrt(n)
            let lhs = union << k;
            if lhs * lhs > 9 * n as u128 {
                return Err(Error::invariant(
                    "family",
                    "|M_delta1(k)| <= 3 * 2^-k * sqrt(n)",
                    format!("n = {n}, delta1 = {d1}, k = {k}, size = {union}"),
                ));
            }
        }
    }

    let fam = FamilyE0 { n, edges, clipped };
    if n >= LEMMA_COUNT_MIN_N {
        let check = Lemma1Check::of(&fam);
        if !check.all() {
            return Err(Error::FamilyMismatch(format!(
                "family size bounds fail at n = {n}: {check:?}"
            )));
        }
    }
    Ok(fam)
}

/// The three family-size bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Check {
    pub e3_at_most_6n: bool,
    pub e1_e2_below_n: bool,
    pub total_at_most_7n: bool,
}

impl Lemma1Check {
    pub fn of(fam: &FamilyE0) -> Self {
        let n = fam.n as usize;
        let e3 = fam.count(SubFamily::E3);
        Lemma1Check {
            e3_at_most_6n: e3 <= 6 * n,
            e1_e2_below_n: fam.len() - e3 < n,
            total_at_most_7n: fam.len() <= 7 * n,
        }
    }

    pub fn all(&self) -> bool {
        self.e3_at_most_6n && self.e1_e2_below_n && self.total_at_most_7n
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyStats {
    pub n: u64,
    pub e1: usize,
    pub e2: usize,
    pub e3: usize,
    pub total: usize,
    pub max_span: u64,
    pub e2_colliding: usize,
    pub min_size_e2_collision_free: Option<u64>,
    pub min_size_e3: Option<u64>,
    pub clipped: usize,
    pub bounds: Lemma1Check,
}

pub fn family_stats(fam: &FamilyE0) -> FamilyStats {
    let min_size = |sub| {
        fam.of(sub)
            .map(|e| edge_cardinality(&e.edge))
            .filter(|c| c.collision_free)
            .map(|c| c.value)
            .min()
    };
    FamilyStats {
        n: fam.n,
        e1: fam.count(SubFamily::E1),
        e2: fam.count(SubFamily::E2),
        e3: fam.count(SubFamily::E3),
        total: fam.len(),
        max_span: fam.base_edges().map(|e| e.span()).max().unwrap_or(0),
        e2_colliding: fam.of(SubFamily::E2).filter(|e| !e.edge.is_collision_free()).count(),
        min_size_e2_collision_free: min_size(SubFamily::E2),
        min_size_e3: min_size(SubFamily::E3),
        clipped: fam.clipped.len(),
        bounds: Lemma1Check::of(fam),
    }
}

/// Flat export row; `k` and `b` are set for `E3` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecord {
    pub subfamily: SubFamily,
    pub d1: u64,
    pub l1: u64,
    pub d2: u64,
    pub l2: u64,
    pub k: Option<u32>,
    pub b: Option<u64>,
}

impl From<&FamilyEdge> for FamilyRecord {
    fn from(fe: &FamilyEdge) -> Self {
        let e = fe.edge;
        FamilyRecord {
            subfamily: fe.subfamily,
            d1: e.d1,
            l1: e.l1,
            d2: e.d2,
            l2: e.l2,
            k: fe.tag.map(|t| t.k),
            b: fe.tag.map(|t| t.b),
        }
    }
}
