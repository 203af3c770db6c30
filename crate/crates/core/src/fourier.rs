//! Fourier transforms of edge indicators and colorings, and the translate
//! sums `sum_a |chi(a + E)|^2`.
//!
//! Convention: `e(x) = exp(2 pi i x)` and `f^(alpha) = sum_z f(z) e(z alpha)`.
//! Phases `z * alpha` are reduced modulo 1 exactly before evaluating `e`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{edge_elements, ApSpec, Coloring, SumEdge};
use crate::numtheory::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub m: u64,
}

impl GridSpec {
    /// The point `t/m`.
    pub fn point(&self, t: u64) -> Rational {
        Rational::new(t as i128, self.m as i128).expect("m > 0")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierPoint {
    pub alpha: Rational,
    pub value: Complex64,
}

/// `e(r/q)` for integers.
fn e_frac(r: i128, q: i128) -> Complex64 {
    let t = TAU * (r.rem_euclid(q) as f64) / q as f64;
    Complex64::new(t.cos(), t.sin())
}

/// `sum_{j < len} e(j * step / q)`.
pub fn geometric_sum(step: i128, q: i128, len: u64) -> Complex64 {
    let step = step.rem_euclid(q);
    let mut r = 0i128;
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..len {
        acc += e_frac(r, q);
        r += step;
        if r >= q {
            r -= q;
        }
    }
    acc
}

pub fn ap_fourier(ap: &ApSpec, alpha: &Rational) -> Complex64 {
    let (p, q) = (alpha.numer(), alpha.denom());
    let start = e_frac((ap.start as i128 * p).rem_euclid(q), q);
    start * geometric_sum(ap.diff as i128 * p % q, q, ap.len)
}

/// `1_E^(alpha)`. A product of two geometric sums when `E` has no collisions,
/// otherwise a sum over the distinct elements.
pub fn indicator_fourier(e: &SumEdge, alpha: &Rational) -> Complex64 {
    if e.is_collision_free() {
        ap_fourier(&e.first(), alpha) * ap_fourier(&e.second(), alpha)
    } else {
        let (p, q) = (alpha.numer(), alpha.denom());
        edge_elements(e)
            .into_iter()
            .map(|z| e_frac((z as i128 * p).rem_euclid(q), q))
            .sum()
    }
}

/// `sum_{x in [1, n]} chi(x) e(x alpha)`.
pub fn coloring_fourier(chi: &Coloring, alpha: &Rational) -> Complex64 {
    let (p, q) = (alpha.numer(), alpha.denom());
    let step = p.rem_euclid(q);
    let mut r = step;
    let mut acc = Complex64::new(0.0, 0.0);
    for &v in chi.values() {
        acc += e_frac(r, q) * v as f64;
        r = (r + step) % q;
    }
    acc
}

/// `chi(a + E)` for every `a` in `[1 - span, n]`, first entry at `a = 1 - span`.
///
/// Uses two running-sum passes when `E` is collision-free, a direct sum otherwise.
pub fn translate_values(chi: &Coloring, e: &SumEdge) -> Vec<i64> {
    let n = chi.n() as i64;
    let span = e.span() as i64;
    let base = 1 - span;
    let len = (n - base + 1) as usize;
    if !e.is_collision_free() {
        let el = edge_elements(e);
        return (0..len as i64)
            .map(|i| el.iter().map(|&x| chi.at(base + i + x as i64)).sum())
            .collect();
    }
    let (d1, l1, d2, l2) = (e.d1 as i64, e.l1 as i64, e.d2 as i64, e.l2 as i64);
    // p[x] = sum_{j < l1} chi(x + j d1), filled from the top down
    let mut p = vec![0i64; len];
    for i in (0..len).rev() {
        let x = base + i as i64;
        let next = if i + (d1 as usize) < len { p[i + d1 as usize] } else { 0 };
        p[i] = chi.at(x) + next - chi.at(x + l1 * d1);
    }
    let at = |v: &[i64], i: usize| v.get(i).copied().unwrap_or(0);
    let mut q = vec![0i64; len];
    for i in (0..len).rev() {
        q[i] = p[i] + at(&q, i + d2 as usize) - at(&p, i + (l2 * d2) as usize);
    }
    q
}

/// `sum_a |chi(a + E)|^2`.
pub fn sum_sq_disc(chi: &Coloring, e: &SumEdge) -> u64 {
    translate_values(chi, e).iter().map(|v| (v * v) as u64).sum()
}

/// Reference version of [`sum_sq_disc`]: a plain loop over translates and elements.
pub fn sum_sq_disc_direct(chi: &Coloring, e: &SumEdge) -> u64 {
    let el = edge_elements(e);
    let n = chi.n() as i64;
    (1 - e.span() as i64..=n)
        .map(|a| {
            let v: i64 = el.iter().map(|&x| chi.at(a + x as i64)).sum();
            (v * v) as u64
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub direct: u64,
    pub spectral: f64,
    pub rel_err: f64,
}

/// Compares `sum_a |chi(a + E)|^2` with `(1/m) sum_t |chi^(t/m)|^2 |1_E^(t/m)|^2`.
///
/// Requires `m > 2 (n + span)`; then the grid sum is exact up to rounding.
pub fn parseval_check(chi: &Coloring, e: &SumEdge, grid: GridSpec) -> Result<ParsevalReport> {
    let needed = 2 * (chi.n() as u64 + e.span());
    if grid.m <= needed {
        return Err(Error::GridTooCoarse { m: grid.m, needed });
    }
    let spectral: f64 = (0..grid.m)
        .map(|t| {
            let a = grid.point(t);
            coloring_fourier(chi, &a).norm_sqr() * indicator_fourier(e, &a).norm_sqr()
        })
        .sum::<f64>()
        / grid.m as f64;
    let direct = sum_sq_disc_direct(chi, e);
    Ok(ParsevalReport {
        direct,
        spectral,
        rel_err: (direct as f64 - spectral).abs() / direct as f64,
    })
}

/// `|1_E^(t/m)|` at every grid point.
pub fn indicator_sweep(e: &SumEdge, grid: GridSpec) -> Vec<FourierPoint> {
    (0..grid.m)
        .map(|t| {
            let alpha = grid.point(t);
            FourierPoint { alpha, value: indicator_fourier(e, &alpha) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q).unwrap()
    }

    #[test]
    fn ap_closed_form() {
        // |sum_{j<L} e(j theta)| = |sin(pi L theta) / sin(pi theta)|
        for (d, l, p, q) in [(3u64, 10u64, 1i128, 7i128), (5, 33, 2, 9), (1, 100, 1, 1000)] {
            let got = ap_fourier(&ApSpec { start: 4, diff: d, len: l }, &r(p, q)).norm();
            let theta = std::f64::consts::PI * (d as f64) * p as f64 / q as f64;
            let want = ((l as f64) * theta).sin().abs() / theta.sin().abs();
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn factorised_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let e = SumEdge::new(
                rng.gen_range(1..30),
                rng.gen_range(1..12),
                rng.gen_range(1..30),
                rng.gen_range(1..12),
            )
            .unwrap();
            let a = r(rng.gen_range(0..997), 997);
            let direct: Complex64 = edge_elements(&e)
                .into_iter()
                .map(|z| {
                    let t = TAU * z as f64 * a.to_f64();
                    Complex64::new(t.cos(), t.sin())
                })
                .sum();
            let got = indicator_fourier(&e, &a);
            assert!((got - direct).norm() < 1e-8 * (1.0 + direct.norm()), "{e}");
        }
    }

    #[test]
    fn fast_translates_match_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let n = rng.gen_range(1..60);
            let chi = Coloring::random(n, &mut rng);
            let e = SumEdge::new(
                rng.gen_range(1..15),
                rng.gen_range(1..8),
                rng.gen_range(1..15),
                rng.gen_range(1..8),
            )
            .unwrap();
            assert_eq!(sum_sq_disc(&chi, &e), sum_sq_disc_direct(&chi, &e), "{e} n={n}");
        }
    }

    #[test]
    fn parseval_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let chi = Coloring::random(20, &mut rng);
        let e = SumEdge::new(2, 3, 5, 2).unwrap();
        let g = GridSpec { m: 2 * (20 + e.span()) + 1 };
        let rep = parseval_check(&chi, &e, g).unwrap();
        assert!(rep.rel_err < 1e-10, "{rep:?}");
        assert!(matches!(
            parseval_check(&chi, &e, GridSpec { m: 10 }),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}
