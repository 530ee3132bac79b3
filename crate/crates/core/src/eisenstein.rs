//! Closed-form Fourier coefficients and Bernoulli-factor certificates.
//!
//! Degree 1: `a(E_k, 0) = 1`, `a(E_k, t) = -(2k/B_k) sigma_{k-1}(t)`.
//!
//! Degree 2: `a(E_k, 0) = 1`; rank-1 classes `(t,0,0)` carry the degree-1
//! coefficient (forced by Φ-consistency); for positive definite `T`,
//!
//! `a(E_k, T) = 2/(zeta(1-k) zeta(3-2k)) * sum_{d | content(T)} d^{k-1} H(k-1, det2(T)/d^2)`
//!
//! with Cohen's `H(r, N) = L(1-r, chi_{D0}) sum_{d|f} mu(d) chi_{D0}(d) d^{r-1} sigma_{2r-1}(f/d)`
//! for `(-1)^r N = D0 f^2`, `H(r, 0) = zeta(1-2r)`, and `H(r, N) = 0` when
//! `(-1)^r N ≡ 2, 3 (mod 4)`. This formula is validated against three
//! independent routes: the ring identity `E4^2 = E8`, Φ-consistency with the
//! degree-1 series, and the weighted class-count oracle for `H(1, N)`.
//!
//! The divisibility statements that live above degree 2 are mechanized as
//! certificates: exact p-adic valuations of the Bernoulli factors appearing
//! in the coefficient bounds, reported as a checkable trace.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{
    bernoulli, format_rat, is_prime, p_valuation, rat_int, residue_mod_p, ArithError, Int, Rat,
    Valuation,
};
use crate::characters::{
    fundamental_decompose, fundamental_discriminants, gen_bernoulli, quad_char, CharError,
};
use crate::exec::{self, Exec};
use crate::qexp::{Expansion1, Expansion2, QexpError, Region2};
use crate::quadforms::{class_list, BinaryQf, FormError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EisError {
    #[error("weight {k} rejected: need even k >= 4")]
    InvalidWeight { k: u32 },
    #[error("Boecherer factor (n={n}, k={k}) needs even k with 2k-n > 2")]
    InvalidFactor { n: u32, k: u32 },
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Qexp(#[from] QexpError),
}

// ---------------------------------------------------------------------------
// Divisor sums
// ---------------------------------------------------------------------------

/// Exact `sigma_r(t) = sum_{0<d|t} d^r`.
pub fn divisor_sigma(r: u32, t: u64) -> Int {
    assert!(t >= 1);
    let mut result = Int::one();
    for (q, e) in trial_factor(t) {
        if r == 0 {
            result *= Int::from(e + 1);
        } else {
            let qr = Int::from(q).pow(r);
            // (q^{r(e+1)} - 1) / (q^r - 1)
            let num = qr.pow(e + 1) - 1;
            let den = qr - 1;
            result *= num / den;
        }
    }
    result
}

fn trial_factor(mut t: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= t {
        if t % q == 0 {
            let mut e = 0;
            while t % q == 0 {
                t /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if t > 1 {
        out.push((t, 1));
    }
    out
}

/// Smallest-prime-factor sieve for the congruence sweeps over `t <= 10^5`.
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfSieve { spf }
    }

    pub fn factor(&self, mut t: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        while t > 1 {
            let q = self.spf[t as usize] as u64;
            let mut e = 0;
            while t % q == 0 {
                t /= q;
                e += 1;
            }
            out.push((q, e));
        }
        out
    }

    /// `sigma_r(t) mod p` as a product of geometric sums.
    pub fn sigma_mod(&self, t: u64, r: u64, p: u64) -> u64 {
        let mut acc: u64 = 1;
        for (q, e) in self.factor(t) {
            let qr = crate::arith::mod_pow(q % p, r, p);
            let mut geo: u64 = 0;
            let mut pw: u64 = 1;
            for _ in 0..=e {
                geo = (geo + pw) % p;
                pw = (pw as u128 * qr as u128 % p as u128) as u64;
            }
            acc = (acc as u128 * geo as u128 % p as u128) as u64;
        }
        acc
    }

    /// Exact `sigma_r(t)` using the sieve factorization.
    pub fn sigma_exact(&self, t: u64, r: u32) -> Int {
        let mut result = Int::one();
        for (q, e) in self.factor(t) {
            let qr = Int::from(q).pow(r);
            let num = qr.pow(e + 1) - 1;
            let den = qr - 1;
            result *= num / den;
        }
        result
    }
}

// ---------------------------------------------------------------------------
// Degree-1 series
// ---------------------------------------------------------------------------

/// `zeta(1-k) = -B_k / k` for even `k >= 2`.
pub fn zeta_one_minus(k: u32) -> Rat {
    debug_assert!(k >= 2 && k % 2 == 0);
    -bernoulli(k) / rat_int(k as i64)
}

fn check_weight(k: u32) -> Result<(), EisError> {
    if k < 4 || k % 2 != 0 {
        return Err(EisError::InvalidWeight { k });
    }
    Ok(())
}

/// Normalized degree-1 Eisenstein series up to `q^{t_max}`.
pub fn eis1(k: u32, t_max: u32) -> Result<Expansion1, EisError> {
    eis1_exec(k, t_max, Exec::default())
}

pub fn eis1_exec(k: u32, t_max: u32, ex: Exec) -> Result<Expansion1, EisError> {
    check_weight(k)?;
    let scale = rat_int(-2 * k as i64) / bernoulli(k);
    let sieve = SpfSieve::new(t_max as usize);
    Ok(Expansion1::from_fn_exec(format!("E{k}^(1)"), t_max, ex, move |t| {
        if t == 0 {
            Rat::one()
        } else {
            &scale * Rat::from_integer(sieve.sigma_exact(t as u64, k - 1))
        }
    }))
}

/// `Delta = q prod (1-q^n)^24` up to `q^{t_max}`, exact integer coefficients.
///
/// Computed as the eighth power of the sparse Jacobi series
/// `eta^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2}`; every addition and
/// multiplication is overflow-checked, and |tau(t)| < 2^101 for t <= 10^5,
/// far inside i128.
pub fn delta_expansion(t_max: u32) -> Expansion1 {
    delta_expansion_exec(t_max, Exec::default())
}

pub fn delta_expansion_exec(t_max: u32, ex: Exec) -> Expansion1 {
    let tau = tau_table(t_max, ex);
    Expansion1::new(
        "Delta",
        tau.iter().map(|&v| Rat::from_integer(Int::from(v))).collect(),
    )
}

/// `tau(t)` for `0 <= t <= t_max` (`tau(0) = 0`).
pub fn tau_table(t_max: u32, ex: Exec) -> Vec<i128> {
    assert!(t_max >= 1);
    let n = (t_max - 1) as usize; // eta^24 exponents needed
    let sparse = eta3_sparse(n);
    let mut dense = vec![0i128; n + 1];
    for &(e, c) in &sparse {
        dense[e] = c as i128;
    }
    for _ in 0..7 {
        dense = convolve_sparse(&dense, &sparse, ex);
    }
    let mut tau = vec![0i128; t_max as usize + 1];
    for t in 1..=t_max as usize {
        tau[t] = dense[t - 1];
    }
    tau
}

fn eta3_sparse(n_max: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let e = k * (k + 1) / 2;
        if e > n_max {
            break;
        }
        let c = (2 * k + 1) as i64;
        out.push((e, if k % 2 == 0 { c } else { -c }));
        k += 1;
    }
    out
}

fn convolve_sparse(dense: &[i128], sparse: &[(usize, i64)], ex: Exec) -> Vec<i128> {
    exec::map_range(ex, dense.len(), |i| {
        let mut acc: i128 = 0;
        for &(e, c) in sparse {
            if e > i {
                break;
            }
            let term = dense[i - e].checked_mul(c as i128).expect("tau kernel overflow");
            acc = acc.checked_add(term).expect("tau kernel overflow");
        }
        acc
    })
}

/// `-(B_12/24) * E_12`: constant term `-B_12/24`, `a(t) = sigma_11(t)`.
pub fn g12_expansion(t_max: u32) -> Expansion1 {
    g12_expansion_exec(t_max, Exec::default())
}

pub fn g12_expansion_exec(t_max: u32, ex: Exec) -> Expansion1 {
    let sieve = SpfSieve::new(t_max as usize);
    let a0 = -bernoulli(12) / rat_int(24);
    Expansion1::from_fn_exec("G12", t_max, ex, move |t| {
        if t == 0 {
            a0.clone()
        } else {
            Rat::from_integer(sieve.sigma_exact(t as u64, 11))
        }
    })
}

// ---------------------------------------------------------------------------
// Cohen H function
// ---------------------------------------------------------------------------

static COHEN_CACHE: Mutex<Option<HashMap<(u32, u64), Rat>>> = Mutex::new(None);

/// Cohen's `H(r, N)`; see the module docs for the exact formula.
pub fn cohen_h(r: u32, n: u64) -> Rat {
    assert!(r >= 1);
    if let Some(v) = COHEN_CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .get(&(r, n))
    {
        return v.clone();
    }
    let value = cohen_h_uncached(r, n);
    COHEN_CACHE
        .lock()
        .unwrap()
        .as_mut()
        .unwrap()
        .insert((r, n), value.clone());
    value
}

fn cohen_h_uncached(r: u32, n: u64) -> Rat {
    if n == 0 {
        return -bernoulli(2 * r) / rat_int(2 * r as i64);
    }
    let d: i64 = if r % 2 == 0 { n as i64 } else { -(n as i64) };
    if !matches!(d.rem_euclid(4), 0 | 1) {
        return Rat::zero();
    }
    let dec = fundamental_decompose(d).expect("checked mod 4");
    let l_value = if dec.d0 == 1 {
        // zeta(1-r); D0 = 1 forces r even here
        -bernoulli(r) / rat_int(r as i64)
    } else {
        let chi = quad_char(dec.d0).expect("fundamental");
        -gen_bernoulli(r, &chi).expect("nontrivial") / rat_int(r as i64)
    };
    let mut sum = Int::zero();
    for (d_div, mu) in squarefree_divisors(dec.f) {
        let chi_d = if dec.d0 == 1 {
            1
        } else {
            quad_char(dec.d0).unwrap().eval(d_div as i64)
        };
        if chi_d == 0 {
            continue;
        }
        let term = Int::from(d_div).pow(r - 1) * divisor_sigma(2 * r - 1, dec.f / d_div);
        let sign = mu * chi_d as i64;
        if sign > 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    l_value * Rat::from_integer(sum)
}

/// Squarefree divisors of `f` with their Moebius values.
fn squarefree_divisors(f: u64) -> Vec<(u64, i64)> {
    let primes: Vec<u64> = trial_factor(f).into_iter().map(|(q, _)| q).collect();
    let mut out = vec![(1u64, 1i64)];
    for q in primes {
        let mut extra: Vec<(u64, i64)> = out.iter().map(|&(d, m)| (d * q, -m)).collect();
        out.append(&mut extra);
    }
    out
}

// ---------------------------------------------------------------------------
// Degree-2 series
// ---------------------------------------------------------------------------

/// The full degree-2 coefficient at any psd index.
pub fn eis2_coefficient(k: u32, t: &BinaryQf) -> Result<Rat, EisError> {
    check_weight(k)?;
    if t.is_zero() {
        return Ok(Rat::one());
    }
    let det2 = t.det2();
    assert!(t.is_psd(), "eis2_coefficient needs a psd index");
    if det2 == 0 {
        let scale = rat_int(-2 * k as i64) / bernoulli(k);
        return Ok(scale * Rat::from_integer(divisor_sigma(k - 1, t.content() as u64)));
    }
    let scale = rat_int(2) / (zeta_one_minus(k) * zeta_one_minus(2 * k - 2));
    let mut sum = Rat::zero();
    for d in divisor_list(t.content() as u64) {
        let h = cohen_h(k - 1, det2 as u64 / (d * d));
        if !h.is_zero() {
            sum += Rat::from_integer(Int::from(d).pow(k - 1)) * h;
        }
    }
    Ok(scale * sum)
}

fn divisor_list(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out
}

/// Degree-2 Eisenstein class table over the complete trace region.
pub fn eis2(k: u32, trace_bound: u32) -> Result<Expansion2, EisError> {
    eis2_exec(k, trace_bound, Exec::default())
}

pub fn eis2_exec(k: u32, trace_bound: u32, ex: Exec) -> Result<Expansion2, EisError> {
    check_weight(k)?;
    Ok(Expansion2::from_class_fn(
        format!("E{k}^(2)"),
        Region2::Trace(trace_bound),
        ex,
        move |t| eis2_coefficient(k, t).expect("weight validated"),
    ))
}

/// Degree-2 Eisenstein values on all reduced classes with `det2 <= bound`
/// (the theorem-sweep region).
pub fn eis2_det2(k: u32, det2_bound: u64, ex: Exec) -> Result<Expansion2, EisError> {
    check_weight(k)?;
    Ok(Expansion2::from_class_fn(
        format!("E{k}^(2)|det2<={det2_bound}"),
        Region2::Det2Classes(det2_bound),
        ex,
        move |t| eis2_coefficient(k, t).expect("weight validated"),
    ))
}

// ---------------------------------------------------------------------------
// Boecherer factors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

/// The T-independent Bernoulli factor of the degree-n Eisenstein coefficient
/// formula: `(k/B_k) * prod_{i=1}^{m} (k-i)/B_{2k-2i}` with `m = (n-2)/2`
/// for even degree and `m = (n-1)/2` for odd degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoechererFactor {
    pub n: u32,
    pub k: u32,
    pub parity: Parity,
    pub value: Rat,
}

pub fn bocherer_factor(n: u32, k: u32) -> Result<BoechererFactor, EisError> {
    if n < 2 || k < 2 || k % 2 != 0 {
        return Err(EisError::InvalidFactor { n, k });
    }
    let (parity, m) = if n % 2 == 0 {
        (Parity::Even, (n - 2) / 2)
    } else {
        (Parity::Odd, (n - 1) / 2)
    };
    if 2 * k <= 2 * m + 2 {
        return Err(EisError::InvalidFactor { n, k });
    }
    let mut value = rat_int(k as i64) / bernoulli(k);
    for i in 1..=m {
        value *= rat_int((k - i) as i64) / bernoulli(2 * k - 2 * i);
    }
    Ok(BoechererFactor { n, k, parity, value })
}

/// `alpha_p(n, k)`: the p-order of the even-degree Boecherer factor.
pub fn alpha_p(n: u32, k: u32, p: u64) -> Result<Valuation, EisError> {
    debug_assert!(n % 2 == 0);
    let f = bocherer_factor(n, k)?;
    Ok(p_valuation(&f.value, p)?.value)
}

/// `beta_p(n, k) = alpha_p(n+1, k)` for odd degree `n`.
pub fn beta_p(n: u32, k: u32, p: u64) -> Result<Valuation, EisError> {
    debug_assert!(n % 2 == 1);
    let f = bocherer_factor(n, k)?;
    Ok(p_valuation(&f.value, p)?.value)
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

/// Which degree->=3 divisibility statement a certificate mechanizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertClaim {
    /// Weight (p+1)/2, degree 3: ord_p((p+1)/B_{(p+1)/2}) + ord_p((p-1)/B_{p-1}) >= 1.
    M1Deg3,
    /// Weight p+1, degree 5: the three factors (p+1)/B_{p+1}, p/B_{2p},
    /// (p-1)/B_{2(p-1)} have exact orders 0, 0, 1.
    M2Deg5,
    /// Weight p+1, degree 4, square det(2T): B_{p-1}/B_{2(p-1)} ≡ 1 (mod p).
    M2Deg4Square,
    /// Weight p+1, degree 4, non-square det(2T):
    /// ord_p(B_{p-1,chi}/B_{2(p-1)}) >= 1 for every fundamental chi.
    M2Deg4Nonsquare,
    /// Even n, k = (n+p-1)/2: ord_p of the odd factor at degree n+1 exceeds
    /// alpha_p(n,k) by exactly ord_p((p-1)/B_{p-1}) = 1.
    M3,
}

impl CertClaim {
    pub fn name(self) -> &'static str {
        match self {
            CertClaim::M1Deg3 => "M1_DEG3",
            CertClaim::M2Deg5 => "M2_DEG5",
            CertClaim::M2Deg4Square => "M2_DEG4_SQUARE",
            CertClaim::M2Deg4Nonsquare => "M2_DEG4_NONSQUARE",
            CertClaim::M3 => "M3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertParams {
    pub p: u64,
    /// Degree parameter, used by M3 only.
    pub n: Option<u32>,
    /// |D0| bound for the M2_DEG4_NONSQUARE character sweep.
    pub disc_bound: u64,
}

impl Default for CertParams {
    fn default() -> Self {
        CertParams { p: 0, n: None, disc_bound: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorTrace {
    pub expr: String,
    pub value: String,
    pub valuation: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "INAPPLICABLE")]
    Inapplicable,
}

/// A checkable proof object: the hypotheses, each Bernoulli factor with its
/// exact value and p-adic valuation, and the verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateTrace {
    pub claim: String,
    pub params: BTreeMap<String, String>,
    pub hypotheses: Vec<Hypothesis>,
    pub factors: Vec<FactorTrace>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

impl CertificateTrace {
    fn new(claim: CertClaim, params: &CertParams) -> Self {
        let mut map = BTreeMap::new();
        map.insert("p".to_string(), params.p.to_string());
        if let Some(n) = params.n {
            map.insert("n".to_string(), n.to_string());
        }
        if claim == CertClaim::M2Deg4Nonsquare {
            map.insert("disc_bound".to_string(), params.disc_bound.to_string());
        }
        CertificateTrace {
            claim: claim.name().to_string(),
            params: map,
            hypotheses: Vec::new(),
            factors: Vec::new(),
            notes: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    fn hypothesis(&mut self, name: impl Into<String>, holds: bool) -> bool {
        self.hypotheses.push(Hypothesis { name: name.into(), holds });
        if !holds {
            self.verdict = Verdict::Inapplicable;
        }
        holds
    }

    fn factor(&mut self, expr: impl Into<String>, value: &Rat, p: u64) -> Valuation {
        let v = p_valuation(value, p).expect("prime checked").value;
        self.factors.push(FactorTrace {
            expr: expr.into(),
            value: format_rat(value),
            valuation: v.to_string(),
        });
        v
    }

    fn require(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        if ok {
            self.notes.push(note);
        } else {
            self.notes.push(format!("FAILED: {note}"));
            self.verdict = Verdict::Fail;
        }
    }
}

/// Run one Bernoulli-factor certificate. Hypothesis failures yield an
/// `INAPPLICABLE` trace naming the failing hypothesis; assertion failures
/// (never observed for true inputs) yield `FAIL`.
pub fn bernoulli_certificate(claim: CertClaim, params: &CertParams) -> CertificateTrace {
    let mut tr = CertificateTrace::new(claim, params);
    let p = params.p;
    if !tr.hypothesis(format!("{p} is prime"), is_prime(p)) {
        return tr;
    }
    match claim {
        CertClaim::M1Deg3 => {
            let ok = tr.hypothesis("p > 7", p > 7) && tr.hypothesis("p ≡ 3 (mod 4)", p % 4 == 3);
            if !ok {
                return tr;
            }
            let half = ((p + 1) / 2) as u32;
            let b_half = bernoulli(half);
            let v1 = tr.factor(format!("B_{half}"), &b_half, p);
            tr.require(v1 == Valuation::Finite(0), format!("ord_{p}(B_{half}) = 0"));

            // class-number congruence B_{(p+1)/2} ≡ -h(-p)/2 (mod p)
            let h = class_list(-(p as i64)).expect("valid").class_number();
            let lhs = residue_mod_p(&b_half, p).expect("p-integral");
            let rhs = residue_mod_p(&(rat_int(-(h as i64)) / rat_int(2)), p).expect("p odd");
            tr.require(
                lhs == rhs,
                format!("B_{half} ≡ -h(-{p})/2 ≡ {rhs} (mod {p}), h = {h}"),
            );

            let f2 = rat_int((p - 1) as i64) / bernoulli((p - 1) as u32);
            let v2 = tr.factor(format!("({}-1)/B_{}", p, p - 1), &f2, p);
            tr.require(v2 == Valuation::Finite(1), format!("ord_{p}((p-1)/B_{{p-1}}) = 1"));

            let unit = rat_int((p + 1) as i64) / b_half;
            let v0 = tr.factor(format!("({}+1)/B_{half}", p), &unit, p);
            let total = match (v0, v2) {
                (Valuation::Finite(a), Valuation::Finite(b)) => a + b,
                _ => i64::MAX,
            };
            tr.require(total >= 1, format!("total valuation {total} >= 1"));
        }
        CertClaim::M2Deg5 => {
            if !tr.hypothesis("p > 5", p > 5) {
                return tr;
            }
            let f1 = rat_int((p + 1) as i64) / bernoulli((p + 1) as u32);
            let v1 = tr.factor(format!("({p}+1)/B_{}", p + 1), &f1, p);
            tr.require(v1 == Valuation::Finite(0), "ord = 0 (Kummer: B_{p+1}/(p+1) ≡ 1/12)");
            let f2 = rat_int(p as i64) / bernoulli(2 * p as u32);
            let v2 = tr.factor(format!("{p}/B_{}", 2 * p), &f2, p);
            tr.require(v2 == Valuation::Finite(0), "ord = 0 (Adams + Kummer)");
            let f3 = rat_int((p - 1) as i64) / bernoulli(2 * (p - 1) as u32);
            let v3 = tr.factor(format!("({p}-1)/B_{}", 2 * (p - 1)), &f3, p);
            tr.require(v3 == Valuation::Finite(1), "ord = 1 (von Staudt-Clausen)");
        }
        CertClaim::M2Deg4Square => {
            if !tr.hypothesis("p > 5", p > 5) {
                return tr;
            }
            let ratio = bernoulli((p - 1) as u32) / bernoulli(2 * (p - 1) as u32);
            tr.factor(format!("B_{}/B_{}", p - 1, 2 * (p - 1)), &ratio, p);
            let r = residue_mod_p(&ratio, p).expect("p-integral by von Staudt-Clausen");
            tr.require(r == 1, format!("B_{{p-1}}/B_{{2(p-1)}} ≡ {r} ≡ 1 (mod {p})"));
        }
        CertClaim::M2Deg4Nonsquare => {
            if !tr.hypothesis("p > 5", p > 5) {
                return tr;
            }
            let b2 = bernoulli(2 * (p - 1) as u32);
            let mut all_ok = true;
            let mut checked = 0u64;
            for d0 in fundamental_discriminants(params.disc_bound) {
                let chi = quad_char(d0).expect("fundamental");
                let b = gen_bernoulli((p - 1) as u32, &chi).expect("nontrivial");
                let ratio = b / &b2;
                let v = tr.factor(format!("B_{{{},chi_{}}}/B_{}", p - 1, d0, 2 * (p - 1)), &ratio, p);
                if !v.at_least(1) {
                    all_ok = false;
                }
                checked += 1;
            }
            tr.require(
                all_ok,
                format!("ord_{p} >= 1 for all {checked} fundamental characters"),
            );
        }
        CertClaim::M3 => {
            let n = match params.n {
                Some(n) => n,
                None => {
                    tr.hypothesis("degree n provided", false);
                    return tr;
                }
            };
            let ok = tr.hypothesis("n even and positive", n > 0 && n % 2 == 0)
                && tr.hypothesis(format!("p > n+3 = {}", n + 3), p > (n + 3) as u64)
                && tr.hypothesis(
                    "p ≡ (-1)^(n/2) (mod 4)",
                    p % 4 == if (n / 2) % 2 == 0 { 1 } else { 3 },
                );
            if !ok {
                return tr;
            }
            let k = (n as u64 + p - 1) / 2;
            tr.notes.push(format!("k = (n+p-1)/2 = {k}"));
            let even = bocherer_factor(n, k as u32).expect("hypotheses give even k >= 4");
            let alpha = tr.factor(format!("even factor (n={n}, k={k})"), &even.value, p);
            tr.require(
                matches!(alpha, Valuation::Finite(_)),
                format!("alpha_{p}({n},{k}) = {alpha} is finite"),
            );
            let odd = bocherer_factor(n + 1, k as u32).expect("same indices plus one");
            let v_odd = tr.factor(format!("odd factor (n={}, k={k})", n + 1), &odd.value, p);
            let jump = rat_int((p - 1) as i64) / bernoulli((p - 1) as u32);
            let v_jump = tr.factor(format!("({p}-1)/B_{}", p - 1), &jump, p);
            tr.require(
                v_jump == Valuation::Finite(1),
                "ord_p((p-1)/B_{p-1}) = 1 (von Staudt-Clausen)",
            );
            let diff = match (v_odd, alpha) {
                (Valuation::Finite(a), Valuation::Finite(b)) => Some(a - b),
                _ => None,
            };
            tr.require(
                diff == Some(1),
                format!("ord_p(odd factor) - alpha_p = {diff:?} = 1"),
            );
        }
    }
    tr
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::qexp::linear_combine1;
    use num_integer::Integer;

    #[test]
    fn sigma_examples() {
        assert_eq!(divisor_sigma(5, 2), Int::from(33));
        assert_eq!(divisor_sigma(7, 1), Int::from(1));
        assert_eq!(divisor_sigma(11, 2), Int::from(2049));
        assert_eq!(divisor_sigma(0, 12), Int::from(6));
    }

    #[test]
    fn sieve_matches_exact() {
        let sieve = SpfSieve::new(2000);
        for t in 1..=2000u64 {
            assert_eq!(sieve.sigma_exact(t, 11), divisor_sigma(11, t));
            let m = sieve.sigma_mod(t, 5, 11);
            let exact = divisor_sigma(5, t);
            assert_eq!(Int::from(m), exact.mod_floor(&Int::from(11)), "t={t}");
        }
    }

    #[test]
    fn eis1_examples() {
        let e6 = eis1(6, 10).unwrap();
        assert_eq!(e6.coeff(0), &Rat::one());
        assert_eq!(e6.coeff(2), &rat_int(-16632));
        let e12 = eis1(12, 3).unwrap();
        assert_eq!(e12.coeff(1), &rat(65520, 691));
        assert!(eis1(5, 3).is_err());
        assert!(eis1(2, 3).is_err());
    }

    #[test]
    fn cohen_h_examples() {
        assert_eq!(cohen_h(1, 3), rat(1, 3));
        assert_eq!(cohen_h(3, 4), rat(-1, 2));
        assert_eq!(cohen_h(3, 3), rat(-2, 9));
        assert_eq!(cohen_h(3, 2), rat_int(0));
        assert_eq!(cohen_h(1, 0), rat(-1, 12));
        assert_eq!(cohen_h(1, 4), rat(1, 2));
        assert_eq!(cohen_h(1, 12), rat(4, 3));
        assert_eq!(cohen_h(5, 3), rat(2, 3));
        assert_eq!(cohen_h(7, 3), rat(-14, 3));
    }

    #[test]
    fn eis2_spot_values() {
        let t111 = BinaryQf::new(1, 1, 1);
        assert_eq!(eis2_coefficient(4, &t111).unwrap(), rat_int(13440));
        assert_eq!(eis2_coefficient(6, &t111).unwrap(), rat_int(44352));
        assert_eq!(eis2_coefficient(8, &t111).unwrap(), rat_int(26880));
        assert_eq!(eis2_coefficient(4, &BinaryQf::new(1, 0, 1)).unwrap(), rat_int(30240));
        // rank 0 and rank 1
        assert_eq!(eis2_coefficient(4, &BinaryQf::ZERO).unwrap(), Rat::one());
        assert_eq!(
            eis2_coefficient(12, &BinaryQf::new(1, 0, 0)).unwrap(),
            rat(65520, 691)
        );
    }

    #[test]
    fn eis2_integral_small_weights() {
        // integer coefficients for k in {4,6,8} on trace <= 6 (higher weights
        // legitimately carry irregular-numerator denominators)
        for k in [4u32, 6, 8] {
            let e = eis2(k, 6).unwrap();
            for (t, v) in e.stored() {
                assert!(v.is_integer(), "k={k} {t:?} -> {v}");
            }
        }
    }

    #[test]
    fn delta_small_values() {
        let d = delta_expansion(10);
        let expect: [i64; 11] = [0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920];
        for (t, want) in expect.iter().enumerate() {
            assert_eq!(d.coeff(t as u32), &rat_int(*want), "t={t}");
        }
    }

    #[test]
    fn delta_matches_e4_e6_identity() {
        // independent oracle: Delta = (E4^3 - E6^2)/1728
        let bound = 200u32;
        let e4 = eis1(4, bound).unwrap();
        let e6 = eis1(6, bound).unwrap();
        let e4cubed = e4.multiply(&e4).multiply(&e4);
        let e6sq = e6.multiply(&e6);
        let oracle = linear_combine1(&[
            (rat(1, 1728), &e4cubed),
            (rat(-1, 1728), &e6sq),
        ]);
        let delta = delta_expansion(bound);
        assert_eq!(oracle.coeffs(), delta.coeffs());
    }

    #[test]
    fn g12_values() {
        let g = g12_expansion(5);
        assert_eq!(g.coeff(0), &rat(691, 65520));
        assert_eq!(g.coeff(2), &rat_int(2049));
    }

    #[test]
    fn bocherer_examples() {
        let f = bocherer_factor(2, 12).unwrap();
        assert_eq!(f.parity, Parity::Even);
        assert_eq!(f.value, rat_int(12) / bernoulli(12));
        assert_eq!(alpha_p(2, 12, 23).unwrap(), Valuation::Finite(0));

        let f = bocherer_factor(3, 8).unwrap();
        assert_eq!(f.parity, Parity::Odd);
        assert_eq!(f.value, rat_int(-1440));
        assert_eq!(beta_p(3, 8, 7).unwrap(), Valuation::Finite(0));

        // beta_p(n,k) = alpha_p(n+1,k)
        assert_eq!(beta_p(3, 8, 7).unwrap(), alpha_p(4, 8, 7).unwrap());
        assert!(bocherer_factor(2, 7).is_err());
    }

    #[test]
    fn certificate_m1_deg3() {
        let tr = bernoulli_certificate(CertClaim::M1Deg3, &CertParams { p: 23, ..Default::default() });
        assert_eq!(tr.verdict, Verdict::Pass);
        assert_eq!(tr.factors[0].expr, "B_12");
        assert_eq!(tr.factors[0].valuation, "0");
        let f2 = tr.factors.iter().find(|f| f.expr == "(23-1)/B_22").unwrap();
        assert_eq!(f2.valuation, "1");
    }

    #[test]
    fn certificate_m2_deg5() {
        let tr = bernoulli_certificate(CertClaim::M2Deg5, &CertParams { p: 7, ..Default::default() });
        assert_eq!(tr.verdict, Verdict::Pass);
        assert_eq!(tr.factors[0].value, "-240");
        assert_eq!(tr.factors[1].value, "6");
        assert_eq!(tr.factors[2].valuation, "1");
    }

    #[test]
    fn certificate_m3_examples() {
        for (n, p) in [(2u32, 7u64), (2, 11), (4, 13), (6, 19)] {
            let tr = bernoulli_certificate(
                CertClaim::M3,
                &CertParams { p, n: Some(n), ..Default::default() },
            );
            assert_eq!(tr.verdict, Verdict::Pass, "(n={n}, p={p}): {tr:?}");
        }
        let tr = bernoulli_certificate(
            CertClaim::M3,
            &CertParams { p: 11, n: Some(4), ..Default::default() },
        );
        assert_eq!(tr.verdict, Verdict::Inapplicable);
        let tr = bernoulli_certificate(
            CertClaim::M3,
            &CertParams { p: 5, n: Some(2), ..Default::default() },
        );
        assert_eq!(tr.verdict, Verdict::Inapplicable);
    }

    #[test]
    fn certificate_m2_deg4() {
        for p in [7u64, 11, 13] {
            let tr = bernoulli_certificate(
                CertClaim::M2Deg4Square,
                &CertParams { p, ..Default::default() },
            );
            assert_eq!(tr.verdict, Verdict::Pass, "square p={p}");
            let tr = bernoulli_certificate(
                CertClaim::M2Deg4Nonsquare,
                &CertParams { p, disc_bound: 40, ..Default::default() },
            );
            assert_eq!(tr.verdict, Verdict::Pass, "nonsquare p={p}");
        }
    }
}
