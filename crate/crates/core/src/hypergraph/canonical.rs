//! Canonical edges of `[1, n]`: the distinct nonempty sets `(a + E) ∩ [1, n]`.
//!
//! Every such set already arises from a *tight* description: a single
//! progression lying inside `[1, n]`, or `d1 < d2`, `l1, l2 >= 2`, spans
//! `s_i = (l_i - 1) d_i` within `n - 1` of each other, and offsets where both
//! extreme corners `a + s1` and `a + s2` fall inside `[1, n]`. Only those
//! descriptions are walked. For each `(d1, d2, l1)`, the base set is kept in a
//! `2n - 1` bit frame centred on `s1`, and windows are read out of that frame
//! as `W` machine words.

use std::collections::HashSet;
use std::hash::{BuildHasherDefault, Hasher};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::{Coloring, SumEdge};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: u64 = 64;
/// Largest `n` handled by the word-packed walk (four 64-bit words).
pub const STREAMING_LIMIT: u64 = 256;

/// One description `(a + E) ∩ [1, n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub edge: SumEdge,
    pub offset: i64,
}

impl Window {
    /// Points of the window, in increasing order.
    pub fn elements(&self, n: u64) -> Vec<u64> {
        super::edge_elements(&self.edge)
            .into_iter()
            .map(|x| x as i64 + self.offset)
            .filter(|&z| z >= 1 && z <= n as i64)
            .map(|z| z as u64)
            .collect()
    }
}

#[inline(always)]
fn extract<const W: usize>(frame: &[u64], p: usize, out: &mut [u64; W]) {
    let w = p / 64;
    let sh = p % 64;
    if sh == 0 {
        out.copy_from_slice(&frame[w..w + W]);
    } else {
        for i in 0..W {
            out[i] = (frame[w + i] >> sh) | (frame[w + i + 1] << (64 - sh));
        }
    }
}

fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

fn edge(d1: i64, l1: i64, d2: i64, l2: i64) -> SumEdge {
    SumEdge { d1: d1 as u64, l1: l1 as u64, d2: d2 as u64, l2: l2 as u64 }
}

/// Calls `f` on every tight window (with repetitions) until it breaks.
fn for_each_window<const W: usize, F>(n: usize, mut f: F)
where
    F: FnMut(&[u64; W], Window) -> ControlFlow<()>,
{
    debug_assert!(n >= 1 && n <= 64 * W && n > 64 * (W - 1));
    for d in 1..=n {
        for a in 1..=n {
            let mut mask = [0u64; W];
            let (mut x, mut len) = (a, 1);
            while x <= n {
                mask[(x - 1) / 64] |= 1 << ((x - 1) % 64);
                let win = Window { edge: edge(d as i64, len, 1, 1), offset: a as i64 };
                if f(&mask, win).is_break() {
                    return;
                }
                x += d;
                len += 1;
            }
        }
    }

    let ni = n as i64;
    let mut frame = vec![0u64; (2 * n - 1) / 64 + W + 2];
    let tail = if n % 64 == 0 { !0 } else { (1u64 << (n % 64)) - 1 };
    for d1 in 1..ni {
        for d2 in d1 + 1..=ni {
            for l1 in 2..=ni {
                let s1 = (l1 - 1) * d1;
                let l2_lo = ceil_div((s1 - ni + 1).max(d2), d2) + 1;
                let l2_hi = ((s1 + ni - 1) / d2 + 1).min(ni);
                if l2_lo > l2_hi {
                    continue;
                }
                frame.fill(0);
                let f_lo = s1 - ni + 1;
                let f_hi = s1 + ni - 1;
                let add_row = |frame: &mut [u64], j2: i64| {
                    let base = j2 * d2;
                    let lo = ceil_div(f_lo - base, d1).max(0);
                    let hi = floor_div(f_hi - base, d1).min(l1 - 1);
                    let mut p = base + lo * d1 - f_lo;
                    for _ in lo..=hi {
                        frame[(p / 64) as usize] |= 1 << (p % 64);
                        p += d1;
                    }
                };
                for j2 in 0..l2_lo - 1 {
                    add_row(&mut frame, j2);
                }
                for l2 in l2_lo..=l2_hi {
                    add_row(&mut frame, l2 - 1);
                    let s2 = (l2 - 1) * d2;
                    let (smin, smax) = (s1.min(s2), s1.max(s2));
                    let mut win = [0u64; W];
                    for o in (smax - ni + 1)..=smin {
                        extract(&frame, (o - f_lo) as usize, &mut win);
                        win[W - 1] &= tail;
                        let w = Window { edge: edge(d1, l1, d2, l2), offset: 1 - o };
                        if f(&win, w).is_break() {
                            return;
                        }
                    }
                }
            }
        }
    }
}

macro_rules! dispatch_words {
    ($n:expr, $func:ident $(, $arg:expr)*) => {
        match ($n as usize).div_ceil(64) {
            1 => $func::<1>($n as usize $(, $arg)*),
            2 => $func::<2>($n as usize $(, $arg)*),
            3 => $func::<3>($n as usize $(, $arg)*),
            4 => $func::<4>($n as usize $(, $arg)*),
            _ => unreachable!("n checked against STREAMING_LIMIT"),
        }
    };
}

fn check_n(n: u64, cap: u64, what: &'static str) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let cap = cap.min(STREAMING_LIMIT);
    if n > cap {
        return Err(Error::CapExceeded { n, cap, what });
    }
    Ok(())
}

/// Distinct canonical edges, stored as packed bitsets (bit `x - 1` for point `x`).
#[derive(Clone, Debug)]
pub struct CanonicalEdges {
    n: usize,
    words: usize,
    masks: Vec<u64>,
}

impl CanonicalEdges {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn len(&self) -> usize {
        self.masks.len() / self.words
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, u64> {
        self.masks.chunks_exact(self.words)
    }

    pub fn mask(&self, i: usize) -> &[u64] {
        &self.masks[i * self.words..(i + 1) * self.words]
    }

    pub fn elements(&self, i: usize) -> Vec<u64> {
        mask_elements(self.mask(i))
    }

    /// `max |chi(S)|` over all edges, with the index of the first maximiser.
    pub fn max_imbalance(&self, chi: &Coloring) -> (u64, usize) {
        let neg = chi.negative_mask();
        let mut best = (0u64, 0usize);
        for (i, s) in self.iter().enumerate() {
            let v = imbalance(s, &neg);
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }
}

pub(crate) fn mask_elements(mask: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    for (w, &word) in mask.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            out.push((w * 64) as u64 + bits.trailing_zeros() as u64 + 1);
            bits &= bits - 1;
        }
    }
    out
}

/// `|chi(S)|` where `neg` marks the points colored -1.
#[inline]
pub(crate) fn signed_sum(s: &[u64], neg: &[u64]) -> i64 {
    let mut size = 0i64;
    let mut negs = 0i64;
    for (a, b) in s.iter().zip(neg) {
        size += a.count_ones() as i64;
        negs += (a & b).count_ones() as i64;
    }
    size - 2 * negs
}

#[inline]
pub(crate) fn imbalance(s: &[u64], neg: &[u64]) -> u64 {
    signed_sum(s, neg).unsigned_abs()
}

fn collect_masks<const W: usize>(n: usize) -> CanonicalEdges {
    let mut seen: HashSet<[u64; W]> = HashSet::new();
    for_each_window::<W, _>(n, |m, _| {
        seen.insert(*m);
        ControlFlow::Continue(())
    });
    let mut sets: Vec<[u64; W]> = seen.into_iter().collect();
    sets.sort_unstable_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    CanonicalEdges { n, words: W, masks: sets.into_iter().flatten().collect() }
}

/// All distinct canonical edges of `[1, n]`; refuses `n > cap`.
pub fn enumerate_canonical_edges(n: u64, cap: u64) -> Result<CanonicalEdges> {
    check_n(n, cap, "canonical edge enumeration")?;
    Ok(dispatch_words!(n, collect_masks))
}

/// Exact `max |chi(S)|` over canonical edges, found by walking every tight window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalMax {
    pub value: u64,
    pub window: Window,
    pub windows_scanned: u64,
}

fn scan_words<const W: usize>(n: usize, chi: &Coloring) -> CanonicalMax {
    let neg_vec = chi.negative_mask();
    let mut neg = [0u64; W];
    neg.copy_from_slice(&neg_vec);
    let mut best = CanonicalMax {
        value: 0,
        window: Window { edge: edge(1, 1, 1, 1), offset: 1 },
        windows_scanned: 0,
    };
    for_each_window::<W, _>(n, |m, w| {
        best.windows_scanned += 1;
        let size: u32 = m.iter().map(|x| x.count_ones()).sum();
        if size as u64 > best.value {
            let v = imbalance(m, &neg);
            if v > best.value {
                best.value = v;
                best.window = w;
            }
        }
        ControlFlow::Continue(())
    });
    best
}

/// Streams all tight windows without storing them; works up to [`STREAMING_LIMIT`].
pub fn scan_max_imbalance(chi: &Coloring) -> Result<CanonicalMax> {
    let n = chi.n() as u64;
    check_n(n, STREAMING_LIMIT, "streaming edge scan")?;
    Ok(dispatch_words!(n, scan_words, chi))
}

#[derive(Default)]
struct PassThrough(u64);

impl Hasher for PassThrough {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, _: &[u8]) {
        unreachable!("only u64 keys are hashed")
    }
    fn write_u64(&mut self, v: u64) {
        self.0 = v;
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fingerprint_count<const W: usize>(n: usize, budget: usize) -> u64 {
    let mut seen: HashSet<u64, BuildHasherDefault<PassThrough>> = HashSet::default();
    for_each_window::<W, _>(n, |m, _| {
        let mut h = 0u64;
        for &w in m {
            h = splitmix(h ^ w);
        }
        seen.insert(h);
        if seen.len() >= budget {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    seen.len() as u64
}

/// A lower bound on the number of canonical edges: distinct 64-bit fingerprints
/// seen before `budget` of them have been collected. Equal sets share a
/// fingerprint, so this never overcounts.
pub fn distinct_edge_lower_bound(n: u64, budget: usize) -> Result<u64> {
    check_n(n, STREAMING_LIMIT, "fingerprint count")?;
    Ok(dispatch_words!(n, fingerprint_count, budget.max(1)))
}
