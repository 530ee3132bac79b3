//! Exact rational arithmetic, Bernoulli numbers and the classical
//! divisibility predicates built on them.
//!
//! The scalar type everywhere is [`Rat`] (`num_rational::BigRational`):
//! always in lowest terms with a positive denominator, so equality is
//! structural and every operation is exact. Bernoulli numbers follow the
//! convention `sum_{j=0}^{m} C(m+1,j) B_j = 0` with `B_0 = 1`, which fixes
//! `B_1 = -1/2`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

pub type Int = BigInt;
pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("DENOMINATOR_DIVISIBLE: denominator divisible by {p}")]
    DenominatorDivisible { p: u64 },
    #[error("{n} is not prime")]
    NotPrime { n: u64 },
    #[error("odd index {m} rejected (von Staudt-Clausen needs even m >= 2)")]
    OddIndex { m: u32 },
    #[error("INVALID_PAIR: Kummer hypothesis fails for (m1={m1}, m2={m2}, p={p})")]
    InvalidPair { m1: u32, m2: u32, p: u64 },
    #[error("prime {p} too small for this predicate")]
    PrimeTooSmall { p: u64 },
    #[error("cannot parse {text:?} as a rational")]
    ParseRational { text: String },
}

/// Shorthand for an integral rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// `n/d` as an exact rational; `d != 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// Render in the canonical `"num/den"` form used by every JSON surface:
/// lowest terms, positive denominator, and a bare integer when `den == 1`.
pub fn format_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Inverse of [`format_rat`]; also accepts an explicit `/1`.
pub fn parse_rat(s: &str) -> Result<Rat, ArithError> {
    let err = || ArithError::ParseRational { text: s.to_string() };
    match s.split_once('/') {
        None => {
            let n: Int = s.parse().map_err(|_| err())?;
            Ok(Rat::from_integer(n))
        }
        Some((n, d)) => {
            let n: Int = n.parse().map_err(|_| err())?;
            let d: Int = d.parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rat::new(n, d))
        }
    }
}

/// Deterministic trial-division primality test. All primes in this crate are
/// small (check hypotheses use p < 2^20), so nothing fancier is needed.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = 7u64;
    // wheel over 2,3,5
    let steps = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut i = 0;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += steps[i];
        i = (i + 1) % steps.len();
    }
    true
}

fn ensure_prime(p: u64) -> Result<(), ArithError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(ArithError::NotPrime { n: p })
    }
}

/// `base^exp mod m` with `m < 2^63`.
pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    debug_assert!(m > 0);
    let mut acc: u128 = 1;
    let mut b: u128 = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` mod prime `p`; `a` must be nonzero mod `p`.
pub fn mod_inverse(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    mod_pow(a % p, p - 2, p)
}

/// Residue of a `BigInt` in `[0, p)`.
pub fn int_residue(n: &Int, p: u64) -> u64 {
    let m = Int::from(p);
    let r = n.mod_floor(&m);
    r.to_u64().expect("mod_floor result fits u64")
}

// ---------------------------------------------------------------------------
// Bernoulli numbers
// ---------------------------------------------------------------------------

static BERNOULLI_CACHE: Mutex<Vec<Rat>> = Mutex::new(Vec::new());

/// `B_m` with `B_1 = -1/2`, by the defining recurrence
/// `sum_{j=0}^{m} C(m+1,j) B_j = 0`, memoized for the whole process.
pub fn bernoulli(m: u32) -> Rat {
    let m = m as usize;
    let mut cache = BERNOULLI_CACHE.lock().unwrap();
    if cache.is_empty() {
        cache.push(Rat::one());
    }
    while cache.len() <= m {
        let k = cache.len(); // computing B_k
        if k > 1 && k % 2 == 1 {
            cache.push(Rat::zero());
            continue;
        }
        let mut sum = Rat::zero();
        let mut binom = Int::one(); // C(k+1, j), starting at j = 0
        for (j, b) in cache.iter().enumerate().take(k) {
            if !b.is_zero() {
                sum += Rat::from_integer(binom.clone()) * b;
            }
            // C(k+1, j+1) = C(k+1, j) * (k+1-j) / (j+1)
            binom = binom * Int::from(k + 1 - j) / Int::from(j + 1);
        }
        // the j = k binomial is C(k+1, k) = k+1
        let bk = -sum / Rat::from_integer(Int::from(k + 1));
        cache.push(bk);
    }
    cache[m].clone()
}

/// Bernoulli polynomial value `B_m(x) = sum_j C(m,j) B_j x^(m-j)`, exact.
pub fn bernoulli_poly_eval(m: u32, x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    let mut binom = Int::one();
    for j in 0..=m {
        acc = acc * x + Rat::from_integer(binom.clone()) * bernoulli(j);
        binom = binom * Int::from(m - j) / Int::from(j + 1);
    }
    acc
}

// ---------------------------------------------------------------------------
// p-adic valuations and residues
// ---------------------------------------------------------------------------

/// A p-adic order: finite, or infinite for the zero input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn at_least(self, bound: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::Infinity => true,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PValuation {
    pub prime: u64,
    pub value: Valuation,
}

fn int_valuation(n: &Int, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = Int::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        n = q;
    }
}

/// Exact `ord_p(q)`, `Infinity` for `q = 0`.
pub fn p_valuation(q: &Rat, p: u64) -> Result<PValuation, ArithError> {
    ensure_prime(p)?;
    let value = if q.is_zero() {
        Valuation::Infinity
    } else {
        Valuation::Finite(int_valuation(q.numer(), p) - int_valuation(q.denom(), p))
    };
    Ok(PValuation { prime: p, value })
}

/// `num * den^{-1} mod p` for a p-integral rational.
pub fn residue_mod_p(q: &Rat, p: u64) -> Result<u64, ArithError> {
    ensure_prime(p)?;
    let den = int_residue(q.denom(), p);
    if den == 0 {
        // lowest terms, so p | den means ord_p(q) < 0
        return Err(ArithError::DenominatorDivisible { p });
    }
    let num = int_residue(q.numer(), p);
    Ok((num as u128 * mod_inverse(den, p) as u128 % p as u128) as u64)
}

// ---------------------------------------------------------------------------
// Classical predicates
// ---------------------------------------------------------------------------

/// von Staudt–Clausen: for even `m >= 2`, `B_m + sum_{(q-1)|m} 1/q` is an
/// integer. Returns the prime set and that integer.
pub fn von_staudt_clausen(m: u32) -> Result<(BTreeSet<u64>, Int), ArithError> {
    if m < 2 || m % 2 != 0 {
        return Err(ArithError::OddIndex { m });
    }
    let mut primes = BTreeSet::new();
    let mut sum = bernoulli(m);
    for q in 2..=(m as u64 + 1) {
        if is_prime(q) && m as u64 % (q - 1) == 0 {
            primes.insert(q);
            sum += Rat::new(Int::one(), Int::from(q));
        }
    }
    assert!(sum.is_integer(), "von Staudt-Clausen failed at m = {m}");
    Ok((primes, sum.to_integer()))
}

/// Kummer congruence: for `m1 ≡ m2 (mod p-1)` with neither divisible by
/// `p-1`, checks `B_{m1}/m1 ≡ B_{m2}/m2 (mod p)`.
pub fn kummer_check(m1: u32, m2: u32, p: u64) -> Result<bool, ArithError> {
    ensure_prime(p)?;
    let pm1 = (p - 1) as u32;
    let bad = |m: u32| m < 2 || m % pm1 == 0;
    if bad(m1) || bad(m2) || (m1 % pm1) != (m2 % pm1) {
        return Err(ArithError::InvalidPair { m1, m2, p });
    }
    let lhs = residue_mod_p(&(bernoulli(m1) / rat_int(m1 as i64)), p)?;
    let rhs = residue_mod_p(&(bernoulli(m2) / rat_int(m2 as i64)), p)?;
    Ok(lhs == rhs)
}

/// `B_m mod p` for even `m` with `(p-1) ∤ m`, via the power sum
/// `S_m(p) = sum_{a<p} a^m ≡ p·B_m (mod p^2)`.
///
/// Exact modular arithmetic throughout; cross-checked against the cached
/// exact Bernoulli numbers in the test suite.
fn bernoulli_mod_p(m: u32, p: u64) -> u64 {
    debug_assert!(m >= 2 && m % 2 == 0 && m as u64 % (p - 1) != 0);
    let p2 = p * p;
    let mut s: u64 = 0;
    for a in 1..p {
        s = (s + mod_pow(a, m as u64, p2)) % p2;
    }
    assert!(s % p == 0, "power-sum congruence failed at (m={m}, p={p})");
    (s / p) % p
}

/// A prime is regular when it divides no numerator among `B_2, ..., B_{p-3}`.
pub fn is_regular_prime(p: u64) -> Result<bool, ArithError> {
    ensure_prime(p)?;
    if p < 3 {
        return Err(ArithError::PrimeTooSmall { p });
    }
    // For m <= p-3 von Staudt-Clausen keeps p out of the denominator, so
    // p | numerator(B_m) is the same as B_m ≡ 0 (mod p).
    for m in (2..=p.saturating_sub(3) as u32).step_by(2) {
        if bernoulli_mod_p(m, p) == 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_base_cases() {
        assert_eq!(bernoulli(0), rat_int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        assert_eq!(bernoulli(13), rat_int(0));
        assert_eq!(bernoulli(10), rat(5, 66));
        assert_eq!(bernoulli(22), rat(854513, 138));
    }

    #[test]
    fn bernoulli_poly_values() {
        assert_eq!(bernoulli_poly_eval(3, &rat_int(0)), rat_int(0));
        assert_eq!(bernoulli_poly_eval(3, &rat(1, 3)), rat(1, 27));
        assert_eq!(bernoulli_poly_eval(7, &rat(1, 3)), rat(49, 2187));
        // B_m(1) = B_m(0) for m >= 2
        for m in 2..=20 {
            assert_eq!(bernoulli_poly_eval(m, &rat_int(1)), bernoulli(m));
        }
        // B_1(1) - B_1(0) = 1
        assert_eq!(bernoulli_poly_eval(1, &rat_int(1)), rat(1, 2));
    }

    #[test]
    fn valuations() {
        let v = p_valuation(&rat(1, 138), 23).unwrap();
        assert_eq!(v.value, Valuation::Finite(-1));
        let v = p_valuation(&rat_int(0), 7).unwrap();
        assert_eq!(v.value, Valuation::Infinity);
        let v = p_valuation(&bernoulli(10), 5).unwrap();
        assert_eq!(v.value, Valuation::Finite(1));
        assert!(p_valuation(&rat_int(1), 6).is_err());
    }

    #[test]
    fn residues() {
        assert_eq!(residue_mod_p(&rat(65520, 691), 23).unwrap(), 16);
        assert_eq!(residue_mod_p(&rat(-691, 2730), 23).unwrap(), 10);
        assert_eq!(
            residue_mod_p(&rat(1, 23), 23),
            Err(ArithError::DenominatorDivisible { p: 23 })
        );
    }

    #[test]
    fn von_staudt_clausen_examples() {
        let (primes, int) = von_staudt_clausen(10).unwrap();
        assert_eq!(primes, BTreeSet::from([2, 3, 11]));
        assert_eq!(int, Int::from(1));
        let (primes, int) = von_staudt_clausen(22).unwrap();
        assert_eq!(primes, BTreeSet::from([2, 3, 23]));
        assert_eq!(int, Int::from(6193));
        assert_eq!(von_staudt_clausen(3), Err(ArithError::OddIndex { m: 3 }));
    }

    #[test]
    fn von_staudt_clausen_sweep() {
        for m in (2..=100).step_by(2) {
            von_staudt_clausen(m).unwrap();
        }
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(kummer_check(12, 2, 11).unwrap(), true);
        assert_eq!(kummer_check(6, 2, 5).unwrap(), true);
        assert_eq!(
            kummer_check(10, 2, 11),
            Err(ArithError::InvalidPair { m1: 10, m2: 2, p: 11 })
        );
    }

    #[test]
    fn adams_divisibility() {
        // ord_p(B_{2p}) >= 1 and ord_p(B_{2p}/(2p)) >= 0 for 5 <= p <= 23
        for p in [5u64, 7, 11, 13, 17, 19, 23] {
            let b = bernoulli(2 * p as u32);
            assert!(p_valuation(&b, p).unwrap().value.at_least(1), "p = {p}");
            let q = b / rat_int(2 * p as i64);
            assert!(p_valuation(&q, p).unwrap().value.at_least(0), "p = {p}");
        }
    }

    #[test]
    fn regular_primes() {
        assert!(is_regular_prime(5).unwrap());
        assert!(is_regular_prime(3).unwrap());
        assert!(!is_regular_prime(37).unwrap());
        assert!(!is_regular_prime(691).unwrap());
        assert!(is_regular_prime(23).unwrap());
    }

    #[test]
    fn bernoulli_mod_p_matches_exact() {
        for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59] {
            for m in (2..p as u32 - 2).step_by(2) {
                if m as u64 % (p - 1) == 0 {
                    continue;
                }
                let exact = residue_mod_p(&bernoulli(m), p).unwrap();
                assert_eq!(bernoulli_mod_p(m, p), exact, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn rat_string_round_trip() {
        for q in [rat(65520, 691), rat_int(-7), rat(1, 2), rat_int(0), rat(-691, 2730)] {
            assert_eq!(parse_rat(&format_rat(&q)).unwrap(), q);
        }
        assert_eq!(parse_rat("3/1").unwrap(), rat_int(3));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn primality() {
        assert!(is_prime(2) && is_prime(3) && is_prime(691) && is_prime(65537));
        assert!(!is_prime(1) && !is_prime(0) && !is_prime(49) && !is_prime(6));
        let small: Vec<u64> = (2..100).filter(|&n| is_prime(n)).collect();
        assert_eq!(small.len(), 25);
    }
}
