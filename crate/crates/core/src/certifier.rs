//! For each `alpha` in `[0, 1)`, an edge of `E0` whose Fourier coefficient at
//! `alpha` is provably large, plus a numerical check of that claim.
//!
//! With `a1/delta1` the approximation from [`select_delta1`] and
//! `eps = |alpha - a1/delta1|`:
//! * case 1: `eps < 1/n`, `delta1 <= 24`. A single progression, bound `n/288`.
//! * case 2: `eps < 1/n`, `delta1 > 24`. A second approximation with
//!   denominator below `delta1`, bound `n/300`.
//! * case 3: `eps >= 1/n`. A second difference `delta2` from `M(b, k)`,
//!   bound `n/288`.

use rayon::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{
    contains, e1_edge, e2_edge, e3_lengths, k_bar, m_contains, E3Tag, FamilyEdge, SubFamily,
    E1_MAX_DELTA,
};
use crate::fourier::indicator_fourier;
use crate::hypergraph::SumEdge;
use crate::numtheory::{
    dirichlet_approx, floor_sqrt, gcd, mod_inverse_pair, select_delta1, totatives, Rational,
};

/// Smallest `n` accepted by [`certify`].
pub const N_MIN: u64 = 576;
/// Slack allowed between the measured coefficient and the bound, relative to `n`.
pub const REL_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum CaseData {
    #[serde(rename = "1")]
    Case1,
    #[serde(rename = "2")]
    Case2 { delta2: u64, a2: i64 },
    #[serde(rename = "3")]
    Case3 {
        k: u32,
        s: i32,
        gamma: Option<u64>,
        b: u64,
        d: Rational,
        mu: i64,
        delta2: u64,
        a2: i64,
    },
}

impl CaseData {
    pub fn number(&self) -> u8 {
        match self {
            CaseData::Case1 => 1,
            CaseData::Case2 { .. } => 2,
            CaseData::Case3 { .. } => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub alpha: Rational,
    pub n: u64,
    pub delta1: u64,
    pub a1: i64,
    /// `|alpha - a1/delta1|`
    pub eps: Rational,
    #[serde(flatten)]
    pub case: CaseData,
    pub subfamily: SubFamily,
    pub edge: SumEdge,
    /// `n/288` or `n/300`.
    pub bound: Rational,
    pub measured: f64,
    pub tolerance: f64,
    pub ok: bool,
}

fn int(v: i128) -> Rational {
    Rational::integer(v)
}

fn fail(invariant: &'static str, detail: String) -> Error {
    Error::invariant("certifier", invariant, detail)
}

/// `12 (L - 1) |delta alpha - a| <= 1`
fn small_phase(l: u64, delta: u64, a: i64, alpha: &Rational, scale: i128) -> bool {
    let err = (*alpha * int(delta as i128) - int(a as i128)).abs();
    int(scale) * int(l as i128 - 1) * err <= int(1)
}

pub fn certify(alpha: &Rational, n: u64) -> Result<Certificate> {
    certify_with_tolerance(alpha, n, REL_TOLERANCE)
}

/// [`certify`] with slack `rel_tol * n` instead of the default.
pub fn certify_with_tolerance(alpha: &Rational, n: u64, rel_tol: f64) -> Result<Certificate> {
    if n < N_MIN {
        return Err(Error::BelowMinN { n, min: N_MIN });
    }
    if alpha.numer() < 0 || *alpha >= int(1) {
        return Err(Error::AlphaOutOfRange(alpha.to_string()));
    }
    let w = select_delta1(alpha, n)?;
    let (delta1, a1) = (w.delta, w.a);
    let (p, q) = (alpha.numer(), alpha.denom());
    // |delta1 alpha - a1| = e/q, eps = e/(q delta1)
    let signed = p * delta1 as i128 - a1 as i128 * q;
    let e = signed.abs();
    let eps = Rational::new(e, q * delta1 as i128)?;
    let close = e * (n as i128) < q * delta1 as i128;

    let (case, fe, bound) = if close && delta1 <= E1_MAX_DELTA {
        let edge = e1_edge(n, delta1);
        if !small_phase(edge.l1, delta1, a1, alpha, 6) {
            return Err(fail("(L1 - 1)|delta1 alpha - a1| <= 1/6", format!("alpha = {alpha}")));
        }
        let fe = FamilyEdge { subfamily: SubFamily::E1, edge, tag: None };
        (CaseData::Case1, fe, Rational::new(n as i128, 288)?)
    } else if close {
        let w2 = dirichlet_approx(alpha, delta1 - 1)?;
        let edge = e2_edge(n, delta1, w2.delta);
        if gcd(delta1, w2.delta) != 1 {
            return Err(fail("gcd(delta1, delta2) = 1", format!("alpha = {alpha}")));
        }
        if !small_phase(edge.l1, delta1, a1, alpha, 12)
            || !small_phase(edge.l2, w2.delta, w2.a, alpha, 12)
        {
            return Err(fail("12 (L_j - 1)|delta_j alpha - a_j| <= 1", format!("alpha = {alpha}")));
        }
        if 150 * edge.l1 * edge.l2 < n {
            return Err(fail("150 L1 L2 >= n", format!("alpha = {alpha}")));
        }
        let fe = FamilyEdge { subfamily: SubFamily::E2, edge, tag: None };
        let case = CaseData::Case2 { delta2: w2.delta, a2: w2.a };
        (case, fe, Rational::new(n as i128, 300)?)
    } else {
        let (case, fe) = case3(alpha, n, delta1, a1, e, signed.signum() as i32)?;
        (case, fe, Rational::new(n as i128, 288)?)
    };

    if !contains(n, &fe) {
        return Err(fail("certificate edge lies in E0", format!("{:?}", fe)));
    }
    let measured = indicator_fourier(&fe.edge, alpha).norm();
    let tolerance = rel_tol * n as f64;
    let ok = measured >= bound.to_f64() - tolerance;
    let cert = Certificate {
        alpha: *alpha,
        n,
        delta1,
        a1,
        eps,
        case,
        subfamily: fe.subfamily,
        edge: fe.edge,
        bound,
        measured,
        tolerance,
        ok,
    };
    if !ok {
        return Err(fail(
            "|1_E^(alpha)| >= bound",
            format!("alpha = {alpha}, measured {measured}, bound {bound}"),
        ));
    }
    Ok(cert)
}

fn case3(
    alpha: &Rational,
    n: u64,
    delta1: u64,
    a1: i64,
    e: i128,
    s: i32,
) -> Result<(CaseData, FamilyEdge)> {
    let q = alpha.denom();
    let big = |what: &str| Error::InvalidArgument(format!("alpha = {alpha} too large: {what}"));
    // largest k with 4^k e^2 n < q^2; then 4^(k+1) e^2 n >= q^2
    let e2n = e.checked_mul(e).and_then(|v| v.checked_mul(n as i128)).ok_or_else(|| big("e^2 n"))?;
    let q2 = q.checked_mul(q).ok_or_else(|| big("q^2"))?;
    let mut k = 0u32;
    while e2n.checked_mul(1i128 << (2 * k + 2)).ok_or_else(|| big("4^k"))? < q2 {
        k += 1;
    }
    let kb = k_bar(n, delta1)?;
    if k > kb {
        return Err(Error::BadK { k, k_bar: kb, delta1 });
    }
    let (gamma, b) = if delta1 == 1 {
        (None, 1)
    } else {
        let g = mod_inverse_pair(a1, delta1)?.k;
        (Some(g), if s > 0 { delta1 - g } else { g })
    };
    if !totatives(delta1).contains(&b) {
        return Err(fail("b is a reduced residue", format!("b = {b}, delta1 = {delta1}")));
    }
    let mu_num = b as i128 * a1 as i128 + s as i128;
    if mu_num % delta1 as i128 != 0 {
        return Err(fail("delta1 divides b a1 + s", format!("alpha = {alpha}")));
    }
    let mu = (mu_num / delta1 as i128) as i64;
    let step = (1i128 << (2 * k)) * delta1 as i128;
    // d = (q - b e) / (e 4^k delta1)
    let d = Rational::new(q - b as i128 * e, e * step)?;
    let t = d.ceil();
    let delta2 = b as i128 + t * step;
    let a2 = mu as i128 + t * (1i128 << (2 * k)) * a1 as i128;
    if delta2 <= 0 || !m_contains(n, delta1, b, k, delta2 as u64) {
        return Err(fail("delta2 in M(b, k)", format!("alpha = {alpha}, delta2 = {delta2}")));
    }
    let delta2 = delta2 as u64;
    let a2 = a2 as i64;
    if gcd(delta1, delta2) != 1 {
        return Err(fail("gcd(delta1, delta2) = 1", format!("alpha = {alpha}")));
    }
    let (l1, l2) = e3_lengths(n, k);
    if delta2 <= l1 {
        return Err(fail("delta2 > L1", format!("alpha = {alpha}")));
    }
    if 144 * l1 * l2 < n {
        return Err(fail("144 L1 L2 >= n", format!("alpha = {alpha}")));
    }
    if !small_phase(l1, delta1, a1, alpha, 12) || !small_phase(l2, delta2, a2, alpha, 12) {
        return Err(fail("12 (L_j - 1)|delta_j alpha - a_j| <= 1", format!("alpha = {alpha}")));
    }
    let edge = SumEdge { d1: delta1, l1, d2: delta2, l2 };
    let fe = FamilyEdge { subfamily: SubFamily::E3, edge, tag: Some(E3Tag { k, b }) };
    Ok((CaseData::Case3 { k, s, gamma, b, d, mu, delta2, a2 }, fe))
}

/// One line of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: Rational,
    pub case: u8,
    pub delta1: u64,
    pub delta2: u64,
    pub k: Option<u32>,
    pub measured: f64,
    pub bound: f64,
    pub ok: bool,
}

impl From<&Certificate> for SweepRow {
    fn from(c: &Certificate) -> Self {
        let k = match c.case {
            CaseData::Case3 { k, .. } => Some(k),
            _ => None,
        };
        SweepRow {
            alpha: c.alpha,
            case: c.case.number(),
            delta1: c.delta1,
            delta2: c.edge.d2,
            k,
            measured: c.measured,
            bound: c.bound.to_f64(),
            ok: c.ok,
        }
    }
}

/// Certifies every point, in parallel, keeping the input order.
pub fn sweep(n: u64, alphas: &[Rational]) -> Result<Vec<SweepRow>> {
    sweep_with_tolerance(n, alphas, REL_TOLERANCE)
}

pub fn sweep_with_tolerance(n: u64, alphas: &[Rational], rel_tol: f64) -> Result<Vec<SweepRow>> {
    alphas
        .par_iter()
        .map(|a| certify_with_tolerance(a, n, rel_tol).map(|c| SweepRow::from(&c)))
        .collect()
}

/// Points just around each `a/delta` with `delta <= sqrt(n)`, where the case
/// split changes: offsets `±1/n`, `±1/(delta sqrt(n))` (rounded both ways) and
/// nudges by `1/(1000 n)`; all reduced into `[0, 1)`.
pub fn adversarial_points(n: u64) -> Vec<Rational> {
    let root = floor_sqrt(n as u128) as i128;
    let ni = n as i128;
    let mut out = Vec::new();
    for delta in 1..=root {
        for a in 0..delta {
            if gcd(a as u64, delta as u64) != 1 {
                continue;
            }
            let centre = Rational::new(a, delta).expect("delta > 0");
            let mut offs = vec![
                Rational::new(1, ni).unwrap(),
                Rational::new(1000 * ni + 1, 1000 * ni * ni).unwrap(),
                Rational::new(1000 * ni - 1, 1000 * ni * ni).unwrap(),
            ];
            for r in [root, root + 1] {
                offs.push(Rational::new(1, delta * r).unwrap());
            }
            offs.push(Rational::zero());
            for o in offs {
                for sgn in [1, -1] {
                    out.push((centre + int(sgn) * o).fract());
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// `t/grid` for `t < grid`, then `random` seeded rationals, then the adversarial points.
pub fn sweep_points(n: u64, grid: u64, random: usize, seed: u64) -> Vec<Rational> {
    let mut pts: Vec<Rational> = (0..grid)
        .map(|t| Rational::new(t as i128, grid as i128).expect("grid > 0"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let q: i128 = rng.gen_range(1..=1_000_000);
        pts.push(Rational::new(rng.gen_range(0..q), q).unwrap());
    }
    pts.extend(adversarial_points(n));
    pts
}
