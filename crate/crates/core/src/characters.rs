//! Kronecker symbol, fundamental discriminants, primitive real quadratic
//! characters and their generalized Bernoulli numbers.
//!
//! A character is always identified by a fundamental discriminant `d0`
//! (`d0 = 1` for the trivial character); evaluation is the Kronecker symbol
//! `(d0 / n)`, totally multiplicative with period equal to the conductor.
//! Callers hand in raw discriminants `D ≡ 0, 1 (mod 4)` and this module
//! extracts the primitive part `D = d0 * f^2`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{
    bernoulli, is_prime, p_valuation, rat_int, residue_mod_p, ArithError, Int, PValuation, Rat,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("kronecker symbol (0/0) is undefined")]
    ZeroOverZero,
    #[error("{d} is not a discriminant (need d ≡ 0, 1 mod 4, d != 0)")]
    NotADiscriminant { d: i64 },
    #[error("TRIVIAL_M1: B_{{1,chi}} for the trivial character is rejected")]
    TrivialM1,
    #[error("P_DIVIDES_CONDUCTOR: p = {p} divides the conductor {f}")]
    PDividesConductor { p: u64, f: u64 },
    #[error("character must be nontrivial here")]
    TrivialCharacter,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Full Kronecker symbol `(a/n)`, including the `n <= 0` and 2-adic
/// conventions. Arguments are `i64`; every call site in this crate stays far
/// below that range.
pub fn kronecker(a: i64, n: i64) -> Result<i32, CharError> {
    if a == 0 && n == 0 {
        return Err(CharError::ZeroOverZero);
    }
    if n == 0 {
        return Ok(if a == 1 || a == -1 { 1 } else { 0 });
    }
    let mut sign = 1i32;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    // (a/2) = 0 for even a, 1 for a ≡ ±1 (mod 8), -1 for a ≡ ±3 (mod 8)
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return Ok(0);
        }
        if matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
    }
    // Jacobi symbol for odd n > 0 via binary reciprocity
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// `D = d0 * f^2` with `d0` fundamental (or 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FundamentalDecomposition {
    pub d0: i64,
    pub f: u64,
}

/// Decompose `D ≡ 0,1 (mod 4)`, `D != 0` into its fundamental part.
pub fn fundamental_decompose(d: i64) -> Result<FundamentalDecomposition, CharError> {
    if d == 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(CharError::NotADiscriminant { d });
    }
    let mut m = d.unsigned_abs();
    let mut f = 1u64;
    let mut squarefree = 1i64;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            f *= p.pow(e / 2);
            if e % 2 == 1 {
                squarefree *= p as i64;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        squarefree *= m as i64;
    }
    if d < 0 {
        squarefree = -squarefree;
    }
    if squarefree.rem_euclid(4) == 1 {
        Ok(FundamentalDecomposition { d0: squarefree, f })
    } else {
        // d ≡ 0,1 (mod 4) forces f even here
        debug_assert!(f % 2 == 0);
        Ok(FundamentalDecomposition { d0: 4 * squarefree, f: f / 2 })
    }
}

/// A primitive real Dirichlet character, identified by its fundamental
/// discriminant. Immutable and freely shareable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadCharacter {
    d0: i64,
    conductor: u64,
}

impl QuadCharacter {
    pub fn fundamental_discriminant(&self) -> i64 {
        self.d0
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_trivial(&self) -> bool {
        self.d0 == 1
    }

    /// `chi(-1)`: +1 for even characters, -1 for odd.
    pub fn parity(&self) -> i32 {
        if self.d0 > 0 {
            1
        } else {
            -1
        }
    }

    pub fn eval(&self, n: i64) -> i32 {
        kronecker(self.d0, n).expect("d0 != 0")
    }
}

/// Character attached to the fundamental part of `D`.
pub fn quad_char(d: i64) -> Result<QuadCharacter, CharError> {
    let dec = fundamental_decompose(d)?;
    let conductor = if dec.d0 == 1 { 1 } else { dec.d0.unsigned_abs() };
    Ok(QuadCharacter { d0: dec.d0, conductor })
}

static GEN_BERNOULLI_CACHE: Mutex<Option<HashMap<(u32, i64), Rat>>> = Mutex::new(None);

/// Generalized Bernoulli number `B_{m,chi} = f^{m-1} sum_{a=1}^{f} chi(a) B_m(a/f)`.
///
/// Evaluated through the equivalent power-sum expansion
/// `sum_j C(m,j) B_j f^{j-1} S_{m-j}` with `S_e = sum_a chi(a) a^e`, which
/// keeps the heavy part in integer arithmetic; the test suite checks it
/// against the conductor-sum form directly. For the trivial character this
/// is `B_m` (with `m = 1` rejected).
pub fn gen_bernoulli(m: u32, chi: &QuadCharacter) -> Result<Rat, CharError> {
    if chi.is_trivial() {
        if m == 1 {
            return Err(CharError::TrivialM1);
        }
        return Ok(bernoulli(m));
    }
    let key = (m, chi.d0);
    if let Some(v) = GEN_BERNOULLI_CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .get(&key)
    {
        return Ok(v.clone());
    }

    let f = chi.conductor;
    // power sums S_e = sum_{a=1}^{f} chi(a) a^e for e = 0..=m
    let mut power_sums = vec![Int::zero(); m as usize + 1];
    for a in 1..=f {
        let s = chi.eval(a as i64);
        if s == 0 {
            continue;
        }
        let mut pw = Int::one();
        let a_big = Int::from(a);
        for e in 0..=m as usize {
            if s > 0 {
                power_sums[e] += &pw;
            } else {
                power_sums[e] -= &pw;
            }
            if e < m as usize {
                pw *= &a_big;
            }
        }
    }
    let f_rat = rat_int(f as i64);
    let mut value = Rat::zero();
    let mut binom = Int::one();
    let mut f_pow = Rat::one() / &f_rat; // f^{j-1}
    for j in 0..=m {
        let bj = bernoulli(j);
        if !bj.is_zero() {
            let s = Rat::from_integer(power_sums[(m - j) as usize].clone());
            value += Rat::from_integer(binom.clone()) * bj * &f_pow * s;
        }
        binom = binom * Int::from(m - j) / Int::from(j + 1);
        f_pow *= &f_rat;
    }

    GEN_BERNOULLI_CACHE
        .lock()
        .unwrap()
        .as_mut()
        .unwrap()
        .insert(key, value.clone());
    Ok(value)
}

/// Exact `ord_p(B_{m,chi})` together with Carlitz's denominator criterion:
/// the denominator can be divisible by `p` only when the conductor is `p`
/// and `m = ((p-1)/2) * t` with `t` odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenBernoulliValuation {
    pub valuation: PValuation,
    pub predicted_denominator_possible: bool,
}

pub fn gen_bernoulli_valuation(
    m: u32,
    chi: &QuadCharacter,
    p: u64,
) -> Result<GenBernoulliValuation, CharError> {
    let value = gen_bernoulli(m, chi)?;
    let valuation = p_valuation(&value, p)?;
    let half = (p - 1) / 2;
    let predicted = chi.conductor == p && {
        let m = m as u64;
        half != 0 && m % half == 0 && (m / half) % 2 == 1
    };
    if !valuation.value.at_least(0) {
        assert!(
            predicted,
            "ord_{p}(B_{{{m},chi_{}}}) < 0 outside the Carlitz regime",
            chi.d0
        );
    }
    Ok(GenBernoulliValuation { valuation, predicted_denominator_possible: predicted })
}

/// Both sides of the Carlitz congruence
/// `B_{p,chi}/p ≡ (1/f)(1 - chi(p)) sum_{s=1}^{f} s*chi(s)  (mod p)`,
/// defined for nontrivial `chi` with `p` coprime to the conductor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CarlitzCheck {
    pub lhs: u64,
    pub rhs: u64,
    pub equal: bool,
}

pub fn carlitz_congruence_check(chi: &QuadCharacter, p: u64) -> Result<CarlitzCheck, CharError> {
    if chi.is_trivial() {
        return Err(CharError::TrivialCharacter);
    }
    if !is_prime(p) {
        return Err(CharError::Arith(ArithError::NotPrime { n: p }));
    }
    let f = chi.conductor;
    if f % p == 0 {
        return Err(CharError::PDividesConductor { p, f });
    }
    let lhs_q = gen_bernoulli(p as u32, chi)? / rat_int(p as i64);
    let lhs = residue_mod_p(&lhs_q, p)?;

    let mut weighted: i64 = 0;
    for s in 1..=f as i64 {
        weighted += s * chi.eval(s) as i64;
    }
    let chi_p = chi.eval(p as i64) as i64;
    let rhs_q = rat_int(1 - chi_p) * rat_int(weighted) / rat_int(f as i64);
    let rhs = residue_mod_p(&rhs_q, p)?;
    Ok(CarlitzCheck { lhs, rhs, equal: lhs == rhs })
}

/// All fundamental discriminants `d0` with `0 < |d0| <= bound`, excluding the
/// trivial `d0 = 1`, in increasing `|d0|` then sign order.
pub fn fundamental_discriminants(bound: u64) -> Vec<i64> {
    let mut out = Vec::new();
    for ad in 1..=bound as i64 {
        for d in [ad, -ad] {
            if d == 1 {
                continue;
            }
            if matches!(d.rem_euclid(4), 0 | 1) {
                if let Ok(dec) = fundamental_decompose(d) {
                    if dec.f == 1 {
                        out.push(d);
                    }
                }
            }
        }
    }
    out
}

/// Conductor-sum form of `B_{m,chi}`, kept as an independent route for the
/// test suite.
#[doc(hidden)]
pub fn gen_bernoulli_conductor_sum(m: u32, chi: &QuadCharacter) -> Rat {
    use crate::arith::bernoulli_poly_eval;
    let f = chi.conductor;
    let f_rat = rat_int(f as i64);
    let mut sum = Rat::zero();
    for a in 1..=f {
        let s = chi.eval(a as i64);
        if s == 0 {
            continue;
        }
        let x = Rat::new(Int::from(a), Int::from(f));
        let term = bernoulli_poly_eval(m, &x);
        if s > 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let mut f_pow = Rat::one();
    for _ in 1..m {
        f_pow *= &f_rat;
    }
    f_pow * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-23, 5).unwrap(), -1);
        assert_eq!(kronecker(7, 1).unwrap(), 1);
        assert_eq!(kronecker(0, 1).unwrap(), 1);
        assert_eq!(kronecker(2, 11).unwrap(), -1);
        assert_eq!(kronecker(0, 0), Err(CharError::ZeroOverZero));
        // n = 0 and negative n conventions
        assert_eq!(kronecker(1, 0).unwrap(), 1);
        assert_eq!(kronecker(-1, 0).unwrap(), 1);
        assert_eq!(kronecker(5, 0).unwrap(), 0);
        assert_eq!(kronecker(-1, -1).unwrap(), -1);
        assert_eq!(kronecker(3, -1).unwrap(), 1);
        assert_eq!(kronecker(-3, -5).unwrap(), -kronecker(-3, 5).unwrap());
    }

    #[test]
    fn euler_criterion() {
        // q^{(p-1)/2} ≡ (q/p) mod p for primes q < p <= 50
        for p in (3..=50).filter(|&n| is_prime(n)) {
            for q in (2..p).filter(|&n| is_prime(n)) {
                let lhs = crate::arith::mod_pow(q, (p - 1) / 2, p);
                let sym = kronecker(q as i64, p as i64).unwrap();
                let rhs = if sym == 1 { 1 } else { p - 1 };
                assert_eq!(lhs, rhs, "q={q} p={p}");
            }
        }
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(fundamental_decompose(-12).unwrap(), FundamentalDecomposition { d0: -3, f: 2 });
        assert_eq!(fundamental_decompose(-23).unwrap(), FundamentalDecomposition { d0: -23, f: 1 });
        assert_eq!(fundamental_decompose(9).unwrap(), FundamentalDecomposition { d0: 1, f: 3 });
        assert_eq!(fundamental_decompose(5).unwrap(), FundamentalDecomposition { d0: 5, f: 1 });
        assert_eq!(fundamental_decompose(-4).unwrap(), FundamentalDecomposition { d0: -4, f: 1 });
        assert!(fundamental_decompose(-13).is_err());
        assert!(fundamental_decompose(0).is_err());
    }

    #[test]
    fn quad_char_examples() {
        let chi = quad_char(-4).unwrap();
        assert_eq!(chi.eval(7), -1);
        assert_eq!(chi.conductor(), 4);
        let chi = quad_char(-3).unwrap();
        assert_eq!(chi.eval(7), 1);
        let chi = quad_char(9).unwrap();
        assert!(chi.is_trivial());
        assert_eq!(chi.conductor(), 1);
        assert_eq!(chi.eval(5), 1);
    }

    #[test]
    fn gen_bernoulli_examples() {
        let chi4 = quad_char(-4).unwrap();
        assert_eq!(gen_bernoulli(3, &chi4).unwrap(), rat(3, 2));
        let chi3 = quad_char(-3).unwrap();
        assert_eq!(gen_bernoulli(1, &chi3).unwrap(), rat(-1, 3));
        assert_eq!(gen_bernoulli(2, &chi3).unwrap(), rat_int(0));
        assert_eq!(gen_bernoulli(5, &chi3).unwrap(), rat(-10, 3));
        let triv = quad_char(1).unwrap();
        assert_eq!(gen_bernoulli(1, &triv), Err(CharError::TrivialM1));
        assert_eq!(gen_bernoulli(2, &triv).unwrap(), rat(1, 6));
    }

    #[test]
    fn gen_bernoulli_matches_conductor_sum() {
        for d in fundamental_discriminants(40) {
            let chi = quad_char(d).unwrap();
            for m in 1..=8 {
                assert_eq!(
                    gen_bernoulli(m, &chi).unwrap(),
                    gen_bernoulli_conductor_sum(m, &chi),
                    "d={d} m={m}"
                );
            }
        }
    }

    #[test]
    fn parity_vanishing() {
        // B_{m,chi} = 0 iff chi(-1) != (-1)^m, for nontrivial chi
        for d in fundamental_discriminants(50) {
            let chi = quad_char(d).unwrap();
            for m in 1..=20u32 {
                let expected_zero = chi.parity() != if m % 2 == 0 { 1 } else { -1 };
                let value = gen_bernoulli(m, &chi).unwrap();
                assert_eq!(value.is_zero(), expected_zero, "d={d} m={m}");
            }
        }
    }

    #[test]
    fn gen_bernoulli_valuation_examples() {
        let chi7 = quad_char(-7).unwrap();
        let v = gen_bernoulli_valuation(3, &chi7, 7).unwrap();
        assert!(v.predicted_denominator_possible);
        assert_eq!(v.valuation.value, crate::arith::Valuation::Finite(-1));

        let v = gen_bernoulli_valuation(7, &chi7, 7).unwrap();
        assert!(!v.predicted_denominator_possible);
        assert!(v.valuation.value.at_least(0));

        let chi3 = quad_char(-3).unwrap();
        let v = gen_bernoulli_valuation(6, &chi3, 7).unwrap();
        assert!(!v.predicted_denominator_possible);
        assert!(v.valuation.value.at_least(0));
    }

    #[test]
    fn carlitz_examples() {
        let chi3 = quad_char(-3).unwrap();
        let c = carlitz_congruence_check(&chi3, 7).unwrap();
        assert_eq!(c.rhs, 0);
        assert!(c.equal);
        let chi4 = quad_char(-4).unwrap();
        let c = carlitz_congruence_check(&chi4, 7).unwrap();
        assert_eq!(c.rhs, 6);
        assert!(c.equal);
        let c = carlitz_congruence_check(&chi3, 5).unwrap();
        assert_eq!(c.rhs, 1);
        assert!(c.equal);
        let chi7 = quad_char(-7).unwrap();
        assert_eq!(
            carlitz_congruence_check(&chi7, 7),
            Err(CharError::PDividesConductor { p: 7, f: 7 })
        );
    }
}
