//! Exact integer and rational arithmetic: gcds, inverses, Dirichlet
//! approximation and comparisons against square roots.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational over `i128`, always in lowest terms with a positive denominator.
///
/// Arithmetic panics on overflow rather than wrapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i128>);

impl Rational {
    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::DegenerateModulus(0));
        }
        Ok(Rational(Ratio::new(num, den)))
    }

    pub fn integer(v: i128) -> Self {
        Rational(Ratio::from_integer(v))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn signum(&self) -> i32 {
        self.numer().signum() as i32
    }

    pub fn floor(&self) -> i128 {
        self.numer().div_euclid(self.denom())
    }

    pub fn ceil(&self) -> i128 {
        -(-self.numer()).div_euclid(self.denom())
    }

    /// Nearest integer, ties broken toward zero.
    pub fn round_half_toward_zero(&self) -> i128 {
        let f = self.floor();
        let twice_frac = 2 * (self.numer() - f * self.denom());
        match twice_frac.cmp(&self.denom()) {
            Ordering::Less => f,
            Ordering::Greater => f + 1,
            Ordering::Equal if self.numer() > 0 => f,
            Ordering::Equal => f + 1,
        }
    }

    /// Representative of `self mod 1` in `[0, 1)`.
    pub fn fract(&self) -> Self {
        let d = self.denom();
        Rational(Ratio::new_raw(self.numer().rem_euclid(d), d))
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("reciprocal of zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_add(&self, o: &Self) -> Option<Self> {
        self.0.checked_add(&o.0).map(Rational)
    }

    pub fn checked_sub(&self, o: &Self) -> Option<Self> {
        self.0.checked_sub(&o.0).map(Rational)
    }

    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        self.0.checked_mul(&o.0).map(Rational)
    }

    pub fn checked_div(&self, o: &Self) -> Option<Self> {
        self.0.checked_div(&o.0).map(Rational)
    }

    /// Exact comparison of `self` with `sqrt(m)`.
    pub fn cmp_sqrt(&self, m: u128) -> Ordering {
        if self.numer() < 0 {
            return if m == 0 { self.numer().cmp(&0) } else { Ordering::Less };
        }
        let p = self.numer() as u128;
        let q = self.denom() as u128;
        let lhs = p.checked_mul(p).expect("rational overflow");
        let rhs = m
            .checked_mul(q.checked_mul(q).expect("rational overflow"))
            .expect("rational overflow");
        lhs.cmp(&rhs)
    }
}

macro_rules! rational_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$checked(&rhs).expect("rational overflow")
            }
        }
    };
}

rational_op!(Add, add, checked_add);
rational_op!(Sub, sub, checked_sub);
rational_op!(Mul, mul, checked_mul);
rational_op!(Div, div, checked_div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::integer(v as i128)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// Accepts only `p/q` with integer `p` and nonzero integer `q`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (p, q) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| err("expected an exact fraction p/q"))?;
        let p: i128 = p.trim().parse().map_err(|_| err("bad numerator"))?;
        let q: i128 = q.trim().parse().map_err(|_| err("bad denominator"))?;
        if q == 0 {
            return Err(err("zero denominator"));
        }
        Rational::new(p, q)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

pub fn ceil_div(a: u128, b: u128) -> u128 {
    a.div_ceil(b)
}

/// Smallest `s` with `s * s >= m`.
pub fn ceil_sqrt(m: u128) -> u128 {
    let s = m.isqrt();
    if s * s == m {
        s
    } else {
        s + 1
    }
}

pub fn floor_sqrt(m: u128) -> u128 {
    m.isqrt()
}

/// `x < sqrt(m)`, exactly.
pub fn lt_sqrt(x: i128, m: u128) -> bool {
    x < 0 || (x as u128).checked_mul(x as u128).expect("overflow") < m
}

/// `x > sqrt(m)`, exactly.
pub fn gt_sqrt(x: i128, m: u128) -> bool {
    x >= 0 && (x as u128).checked_mul(x as u128).expect("overflow") > m
}

/// Inverses of `a` modulo `delta`: `a*k ≡ 1` and `a*k_neg ≡ -1`, both in `[1, delta]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InversePair {
    pub k: u64,
    pub k_neg: u64,
}

pub fn mod_inverse_pair(a: i64, delta: u64) -> Result<InversePair> {
    if delta == 0 {
        return Err(Error::DegenerateModulus(0));
    }
    let m = delta as i128;
    let a_red = (a as i128).rem_euclid(m);
    if gcd(a_red as u64, delta) != 1 {
        return Err(Error::NotCoprime { a, delta });
    }
    // extended Euclid on (a_red, m)
    let (mut r0, mut r1) = (a_red, m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    let to_range = |v: i128| -> u64 {
        let r = v.rem_euclid(m);
        if r == 0 {
            delta
        } else {
            r as u64
        }
    };
    Ok(InversePair {
        k: to_range(s0),
        k_neg: to_range(-s0),
    })
}

/// Reduced residues in `[1, delta]`. For `delta = 1` this is `{1}`.
pub fn totatives(delta: u64) -> Vec<u64> {
    (1..=delta).filter(|&b| gcd(b, delta) == 1).collect()
}

/// A rational approximation `a/delta` of some alpha, with the exact error `|delta*alpha - a|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletWitness {
    pub delta: u64,
    pub a: i64,
    pub err: Rational,
}

fn witness_at(alpha: &Rational, delta: u64) -> DirichletWitness {
    let x = *alpha * Rational::integer(delta as i128);
    let a = x.round_half_toward_zero();
    DirichletWitness {
        delta,
        a: a as i64,
        err: (x - Rational::integer(a)).abs(),
    }
}

/// Best approximation with `1 <= delta <= k`: minimal error, smallest `delta` on ties.
///
/// The result is reduced and its error is at most `1/(k+1)`. Linear in `k`.
pub fn dirichlet_approx(alpha: &Rational, k: u64) -> Result<DirichletWitness> {
    if k == 0 {
        return Err(Error::InvalidArgument("dirichlet_approx needs k >= 1".into()));
    }
    let mut best = witness_at(alpha, 1);
    for delta in 2..=k {
        let w = witness_at(alpha, delta);
        if w.err < best.err {
            best = w;
            if best.err.is_zero() {
                break;
            }
        }
    }
    Ok(best)
}

/// Smallest `delta <= floor(sqrt(n))` with `|delta*alpha - a| < n^(-1/2)`.
///
/// Such a delta exists because the best approximation with denominator at most
/// `floor(sqrt(n))` has error at most `1/(floor(sqrt(n)) + 1) < n^(-1/2)`.
pub fn select_delta1(alpha: &Rational, n: u64) -> Result<DirichletWitness> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let root = floor_sqrt(n as u128) as u64;
    for delta in 1..=root {
        let w = witness_at(alpha, delta);
        // err^2 * n < 1
        let e = w.err;
        let lhs = (e.numer() as u128)
            .checked_mul(e.numer() as u128)
            .and_then(|v| v.checked_mul(n as u128))
            .expect("overflow");
        let rhs = (e.denom() as u128).pow(2);
        if lhs < rhs {
            let g = gcd(w.a.unsigned_abs(), w.delta);
            return Ok(DirichletWitness {
                delta: w.delta / g,
                a: w.a / g as i64,
                err: e / Rational::integer(g as i128),
            });
        }
    }
    Err(Error::invariant(
        "numtheory",
        "select_delta1 exists",
        format!("no delta <= {root} for alpha = {alpha}, n = {n}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q).unwrap()
    }

    #[test]
    fn parse_accepts_fractions_only() {
        assert_eq!("3/6".parse::<Rational>().unwrap(), r(1, 2));
        assert_eq!("-1/3".parse::<Rational>().unwrap(), r(-1, 3));
        assert!("0.5".parse::<Rational>().is_err());
        assert!("1".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("a/b".parse::<Rational>().is_err());
    }

    #[test]
    fn rounding_ties_toward_zero() {
        assert_eq!(r(5, 2).round_half_toward_zero(), 2);
        assert_eq!(r(-5, 2).round_half_toward_zero(), -2);
        assert_eq!(r(7, 3).round_half_toward_zero(), 2);
        assert_eq!(r(8, 3).round_half_toward_zero(), 3);
        assert_eq!(r(-8, 3).round_half_toward_zero(), -3);
        assert_eq!(r(-7, 2).floor(), -4);
        assert_eq!(r(-7, 2).ceil(), -3);
        assert_eq!(r(-1, 3).fract(), r(2, 3));
    }

    #[test]
    fn inverse_pair_examples() {
        let p = mod_inverse_pair(3, 7).unwrap();
        assert_eq!((p.k, p.k_neg), (5, 2));
        let p = mod_inverse_pair(1, 1).unwrap();
        assert_eq!((p.k, p.k_neg), (1, 1));
        assert_eq!(
            mod_inverse_pair(4, 6),
            Err(Error::NotCoprime { a: 4, delta: 6 })
        );
        assert!(matches!(mod_inverse_pair(1, 0), Err(Error::DegenerateModulus(0))));
    }

    #[test]
    fn inverse_pair_exhaustive() {
        for delta in 1..60u64 {
            for a in -70i64..70 {
                match mod_inverse_pair(a, delta) {
                    Ok(p) => {
                        let m = delta as i128;
                        assert_eq!((a as i128 * p.k as i128).rem_euclid(m), 1 % m);
                        assert_eq!((a as i128 * p.k_neg as i128 + 1).rem_euclid(m), 0);
                        assert!((1..=delta).contains(&p.k));
                        assert!((1..=delta).contains(&p.k_neg));
                    }
                    Err(_) => assert_ne!(gcd(a.unsigned_abs(), delta), 1),
                }
            }
        }
    }

    #[test]
    fn totatives_match_euler_phi() {
        assert_eq!(totatives(1), vec![1]);
        assert_eq!(totatives(12), vec![1, 5, 7, 11]);
        assert_eq!(totatives(13).len(), 12);
    }

    #[test]
    fn sqrt_helpers() {
        for m in 0..2000u128 {
            let s = ceil_sqrt(m);
            assert!(s * s >= m && (s == 0 || (s - 1) * (s - 1) < m));
        }
        assert!(lt_sqrt(3, 10) && !lt_sqrt(4, 16) && lt_sqrt(-5, 0));
        assert!(gt_sqrt(4, 15) && !gt_sqrt(4, 16) && !gt_sqrt(-1, 0));
        assert_eq!(r(3, 2).cmp_sqrt(2), Ordering::Greater);
        assert_eq!(r(7, 5).cmp_sqrt(2), Ordering::Less);
        assert_eq!(r(4, 2).cmp_sqrt(4), Ordering::Equal);
    }

    #[test]
    fn dirichlet_bound_and_reduced() {
        for q in 1..80i128 {
            for p in 0..q {
                let alpha = r(p, q);
                for k in 1..30u64 {
                    let w = dirichlet_approx(&alpha, k).unwrap();
                    assert!(w.delta >= 1 && w.delta <= k);
                    assert!(w.err <= r(1, k as i128 + 1));
                    assert_eq!(gcd(w.a.unsigned_abs(), w.delta), 1);
                }
            }
        }
    }

    #[test]
    fn select_delta1_brute_force() {
        for n in [2u64, 3, 10, 99, 100, 576, 1000] {
            for q in 1..60i128 {
                for p in 0..q {
                    let alpha = r(p, q);
                    let w = select_delta1(&alpha, n).unwrap();
                    let root = floor_sqrt(n as u128) as u64;
                    assert!(w.delta <= root);
                    // exact: err^2 * n < 1
                    assert!(w.err * w.err * Rational::integer(n as i128) < Rational::integer(1));
                    assert_eq!(gcd(w.a.unsigned_abs(), w.delta), 1);
                    // minimality
                    for d in 1..w.delta {
                        let e = witness_at(&alpha, d).err;
                        assert!(e * e * Rational::integer(n as i128) >= Rational::integer(1));
                    }
                }
            }
        }
    }
}
