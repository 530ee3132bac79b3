//! The closed registry of verification checks.
//!
//! Each check reproduces one in-scope congruence statement as a sweep over
//! Fourier indices, a Bernoulli-factor certificate, or both. Hypothesis
//! filters run first and yield `INAPPLICABLE` (never `FAIL`): the harness
//! does not extrapolate a statement beyond its stated hypotheses.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use serde_json::json;
use thiserror::Error;

use siegel_core::arith::{bernoulli, is_prime, rat_int, residue_mod_p};
use siegel_core::characters::{
    carlitz_congruence_check, fundamental_discriminants, kronecker, quad_char,
};
use siegel_core::eisenstein::{
    bernoulli_certificate, cohen_h, delta_expansion_exec, eis1_exec, eis2_det2, eis2_exec,
    g12_expansion_exec, CertClaim, CertParams, CertificateTrace, SpfSieve, Verdict,
};
use siegel_core::exec::Exec;
use siegel_core::lattices::{genus_theta1, genus_theta2, leech_theta_identity_check};
use siegel_core::qexp::{
    congruence_violations1, congruence_violations2, kernel_report2, Expansion1, Expansion2,
    KernelMode, Region2,
};
use siegel_core::quadforms::{class_list, enumerate_psd, hurwitz_weighted_count};

use crate::cache::Cache;
use crate::report::{CongruenceReport, Status, ARTIFACT_VERSION};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("UNKNOWN_CHECK: {0:?}")]
    UnknownCheck(String),
    #[error("check {check} requires parameter {param}")]
    MissingParam { check: &'static str, param: &'static str },
}

/// The closed check registry; unknown ids are rejected at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckId {
    M1,
    M2,
    M3,
    Wilton,
    Mod691,
    Leech23,
    Padic,
    RingIdentity,
    PhiConsistency,
    HurwitzOracle,
    ClassnumCongruence,
}

impl CheckId {
    pub fn name(self) -> &'static str {
        match self {
            CheckId::M1 => "M1",
            CheckId::M2 => "M2",
            CheckId::M3 => "M3",
            CheckId::Wilton => "WILTON",
            CheckId::Mod691 => "MOD691",
            CheckId::Leech23 => "LEECH23",
            CheckId::Padic => "PADIC",
            CheckId::RingIdentity => "RING_IDENTITY",
            CheckId::PhiConsistency => "PHI_CONSISTENCY",
            CheckId::HurwitzOracle => "HURWITZ_ORACLE",
            CheckId::ClassnumCongruence => "CLASSNUM_CONGRUENCE",
        }
    }

    pub fn all() -> &'static [CheckId] {
        &[
            CheckId::RingIdentity,
            CheckId::PhiConsistency,
            CheckId::HurwitzOracle,
            CheckId::ClassnumCongruence,
            CheckId::M1,
            CheckId::M2,
            CheckId::M3,
            CheckId::Wilton,
            CheckId::Mod691,
            CheckId::Leech23,
            CheckId::Padic,
        ]
    }
}

impl FromStr for CheckId {
    type Err = CheckError;

    fn from_str(s: &str) -> Result<Self, CheckError> {
        CheckId::all()
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| CheckError::UnknownCheck(s.to_string()))
    }
}

/// Parameters a check may consume; `defaults_for` pins the per-check
/// defaults from the acceptance criteria.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckParams {
    pub prime: Option<u64>,
    pub det2_bound: u64,
    pub t_bound: u32,
    pub trace_bound: u32,
    pub disc_bound: u64,
    pub n: Option<u32>,
    pub enum_bound: u32,
    pub violation_cap: usize,
}

impl CheckParams {
    pub fn defaults_for(id: CheckId) -> CheckParams {
        let mut p = CheckParams {
            prime: None,
            det2_bound: 4000,
            t_bound: 100_000,
            trace_bound: 6,
            disc_bound: 100,
            n: None,
            enum_bound: 3,
            violation_cap: 100,
        };
        match id {
            CheckId::Padic => {
                p.det2_bound = 200;
                p.t_bound = 300;
            }
            CheckId::Leech23 => p.t_bound = 10_000,
            CheckId::RingIdentity | CheckId::PhiConsistency => p.t_bound = 50,
            CheckId::HurwitzOracle => p.t_bound = 500,
            CheckId::ClassnumCongruence => p.t_bound = 200,
            _ => {}
        }
        p
    }
}

/// Primes a check runs over when none is supplied.
pub fn default_primes(id: CheckId) -> &'static [u64] {
    match id {
        CheckId::M1 | CheckId::Padic => &[11, 19, 23],
        CheckId::M2 => &[7, 11, 13],
        _ => &[],
    }
}

/// Default (n, p) pairs for the M3 certificate.
pub fn m3_default_pairs() -> &'static [(u32, u64)] {
    &[(2, 7), (2, 11), (4, 13), (6, 19)]
}

/// Expand a check invocation into concrete runs (filling in the default
/// prime set / M3 pairs when the parameters leave them open).
pub fn expand(id: CheckId, params: &CheckParams) -> Vec<(CheckId, CheckParams)> {
    match id {
        CheckId::M1 | CheckId::M2 | CheckId::Padic if params.prime.is_none() => default_primes(id)
            .iter()
            .map(|&p| (id, CheckParams { prime: Some(p), ..params.clone() }))
            .collect(),
        CheckId::M3 if params.prime.is_none() && params.n.is_none() => m3_default_pairs()
            .iter()
            .map(|&(n, p)| {
                (id, CheckParams { prime: Some(p), n: Some(n), ..params.clone() })
            })
            .collect(),
        _ => vec![(id, params.clone())],
    }
}

/// The full default suite in deterministic order.
pub fn default_suite() -> Vec<(CheckId, CheckParams)> {
    let mut out = Vec::new();
    for &id in CheckId::all() {
        out.extend(expand(id, &CheckParams::defaults_for(id)));
    }
    out
}

/// Execution context shared by the checks.
#[derive(Debug, Clone, Default)]
pub struct RunCtx {
    pub exec: Exec,
    pub cache: Option<Cache>,
}

impl RunCtx {
    fn eis2_det2_table(&self, k: u32, bound: u64) -> Expansion2 {
        let compute = || eis2_det2(k, bound, self.exec).expect("valid weight");
        match &self.cache {
            Some(c) => c.eis2_det2(k, bound, compute),
            None => compute(),
        }
    }

    fn eis2_trace_table(&self, k: u32, bound: u32) -> Expansion2 {
        let compute = || eis2_exec(k, bound, self.exec).expect("valid weight");
        match &self.cache {
            Some(c) => c.eis2_trace(k, bound, compute),
            None => compute(),
        }
    }

    fn delta(&self, t_max: u32) -> Expansion1 {
        let compute = || delta_expansion_exec(t_max, self.exec);
        match &self.cache {
            Some(c) => c.deg1("delta", 12, t_max, compute),
            None => compute(),
        }
    }

    fn g12(&self, t_max: u32) -> Expansion1 {
        let compute = || g12_expansion_exec(t_max, self.exec);
        match &self.cache {
            Some(c) => c.deg1("g12", 12, t_max, compute),
            None => compute(),
        }
    }
}

struct Outcome {
    params: BTreeMap<String, serde_json::Value>,
    violations: Vec<String>,
    certificate: Option<serde_json::Value>,
    inapplicable: Option<String>,
    certificates_ok: bool,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            params: BTreeMap::new(),
            violations: Vec::new(),
            certificate: None,
            inapplicable: None,
            certificates_ok: true,
        }
    }

    fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    fn inapplicable(&mut self, why: impl Into<String>) {
        self.inapplicable = Some(why.into());
    }

    fn traces(&mut self, traces: Vec<CertificateTrace>) {
        for t in &traces {
            match t.verdict {
                Verdict::Pass => {}
                Verdict::Fail => self.certificates_ok = false,
                Verdict::Inapplicable => {
                    let failing = t
                        .hypotheses
                        .iter()
                        .find(|h| !h.holds)
                        .map(|h| h.name.clone())
                        .unwrap_or_else(|| "hypothesis".to_string());
                    self.inapplicable = Some(format!("{}: {failing}", t.claim));
                }
            }
        }
        self.certificate = Some(json!({ "traces": traces }));
    }

    fn into_report(self, id: CheckId, cap: usize, started: Instant) -> CongruenceReport {
        let status = if let Some(why) = &self.inapplicable {
            let mut cert = self.certificate.clone().unwrap_or_else(|| json!({}));
            cert["inapplicable"] = json!(why);
            return CongruenceReport {
                check: id.name().to_string(),
                params: self.params,
                status: Status::Inapplicable,
                violations: Vec::new(),
                violation_count: 0,
                certificate: Some(cert),
                elapsed_ms: started.elapsed().as_millis() as u64,
                artifact_version: ARTIFACT_VERSION.to_string(),
            };
        } else if self.violations.is_empty() && self.certificates_ok {
            Status::Pass
        } else {
            Status::Fail
        };
        let violation_count = self.violations.len() as u64;
        let mut violations = self.violations;
        violations.truncate(cap);
        CongruenceReport {
            check: id.name().to_string(),
            params: self.params,
            status,
            violations,
            violation_count,
            certificate: self.certificate,
            elapsed_ms: started.elapsed().as_millis() as u64,
            artifact_version: ARTIFACT_VERSION.to_string(),
        }
    }
}

/// Run one fully-specified check.
pub fn run_check(
    id: CheckId,
    params: &CheckParams,
    ctx: &RunCtx,
) -> Result<CongruenceReport, CheckError> {
    let started = Instant::now();
    let mut out = Outcome::new();
    match id {
        CheckId::M1 => check_m1(params, ctx, &mut out)?,
        CheckId::M2 => check_m2(params, ctx, &mut out)?,
        CheckId::M3 => check_m3(params, &mut out)?,
        CheckId::Wilton => check_wilton(params, ctx, &mut out),
        CheckId::Mod691 => check_mod691(params, ctx, &mut out),
        CheckId::Leech23 => check_leech23(params, ctx, &mut out),
        CheckId::Padic => check_padic(params, ctx, &mut out)?,
        CheckId::RingIdentity => check_ring_identity(params, ctx, &mut out),
        CheckId::PhiConsistency => check_phi_consistency(params, ctx, &mut out),
        CheckId::HurwitzOracle => check_hurwitz(params, &mut out),
        CheckId::ClassnumCongruence => check_classnum(params, &mut out),
    }
    Ok(out.into_report(id, params.violation_cap, started))
}

/// Run a list of concrete checks, in parallel when the context allows,
/// collecting reports in input order.
pub fn run_suite(
    specs: &[(CheckId, CheckParams)],
    ctx: &RunCtx,
) -> Result<Vec<CongruenceReport>, CheckError> {
    if ctx.exec == Exec::Parallel {
        use rayon::prelude::*;
        specs
            .par_iter()
            .map(|(id, params)| run_check(*id, params, ctx))
            .collect()
    } else {
        specs.iter().map(|(id, params)| run_check(*id, params, ctx)).collect()
    }
}

fn require_prime(id: CheckId, params: &CheckParams) -> Result<u64, CheckError> {
    params.prime.ok_or(CheckError::MissingParam { check: id.name(), param: "prime" })
}

// --- Theorem M-1: weight (p+1)/2 --------------------------------------------

fn check_m1(params: &CheckParams, ctx: &RunCtx, out: &mut Outcome) -> Result<(), CheckError> {
    let p = require_prime(CheckId::M1, params)?;
    out.param("prime", p);
    out.param("det2_bound", params.det2_bound);
    out.param("t_bound", params.t_bound);
    if !is_prime(p) || p <= 7 || p % 4 != 3 {
        out.inapplicable(format!("needs a prime p > 7 with p ≡ 3 (mod 4), got {p}"));
        return Ok(());
    }
    let k = ((p + 1) / 2) as u32;

    // (1-II): theta-kernel sweep over reduced classes with det2 <= bound
    let table = ctx.eis2_det2_table(k, params.det2_bound);
    match kernel_report2(&table, p, KernelMode::ThetaKernel) {
        Ok(viols) => out
            .violations
            .extend(viols.into_iter().map(|t| t.key())),
        Err(e) => out.violations.push(format!("sweep error: {e}")),
    }

    // (1-III): sigma_{(p-1)/2}(t) ≡ 0 (mod p) whenever chi_{-p}(t) = -1
    let sieve = SpfSieve::new(params.t_bound as usize);
    let r = (p - 1) / 2;
    for t in 1..=params.t_bound as u64 {
        if kronecker(-(p as i64), t as i64).expect("t > 0") == -1
            && sieve.sigma_mod(t, r, p) != 0
        {
            out.violations.push(format!("t={t}"));
        }
    }

    // (1-I) as its Bernoulli-factor certificate
    out.traces(vec![bernoulli_certificate(
        CertClaim::M1Deg3,
        &CertParams { p, ..Default::default() },
    )]);
    Ok(())
}

// --- Theorem M-2: weight p+1 -------------------------------------------------

fn check_m2(params: &CheckParams, ctx: &RunCtx, out: &mut Outcome) -> Result<(), CheckError> {
    let p = require_prime(CheckId::M2, params)?;
    out.param("prime", p);
    out.param("det2_bound", params.det2_bound);
    out.param("disc_bound", params.disc_bound);
    if !is_prime(p) || p <= 5 {
        out.inapplicable(format!("needs a prime p > 5, got {p}"));
        return Ok(());
    }
    let k = (p + 1) as u32;

    // (2-III): vanishing on classes with chi_T(p) = 1
    let table = ctx.eis2_det2_table(k, params.det2_bound);
    for (t, value) in table.stored() {
        if kronecker(-t.det2(), p as i64).expect("nonzero") != 1 {
            continue;
        }
        match residue_mod_p(value, p) {
            Ok(0) => {}
            Ok(_) => out.violations.push(t.key()),
            Err(e) => out.violations.push(format!("{}: {e}", t.key())),
        }
    }

    // Carlitz (5.5) cross-check over fundamental discriminants coprime to p
    let mut carlitz_checked = 0u64;
    for d0 in fundamental_discriminants(params.disc_bound) {
        if d0.unsigned_abs() % p == 0 {
            continue;
        }
        let chi = quad_char(d0).expect("fundamental");
        match carlitz_congruence_check(&chi, p) {
            Ok(c) if c.equal => carlitz_checked += 1,
            Ok(c) => out
                .violations
                .push(format!("carlitz:D0={d0} lhs={} rhs={}", c.lhs, c.rhs)),
            Err(e) => out.violations.push(format!("carlitz:D0={d0}: {e}")),
        }
    }

    let cert_params = CertParams { p, disc_bound: params.disc_bound, ..Default::default() };
    out.traces(vec![
        bernoulli_certificate(CertClaim::M2Deg5, &cert_params),
        bernoulli_certificate(CertClaim::M2Deg4Square, &cert_params),
        bernoulli_certificate(CertClaim::M2Deg4Nonsquare, &cert_params),
    ]);
    if let Some(cert) = out.certificate.as_mut() {
        cert["carlitz_checked"] = json!(carlitz_checked);
    }
    Ok(())
}

// --- Theorem M-3 -------------------------------------------------------------

fn check_m3(params: &CheckParams, out: &mut Outcome) -> Result<(), CheckError> {
    let p = require_prime(CheckId::M3, params)?;
    let n = params.n.ok_or(CheckError::MissingParam { check: "M3", param: "n" })?;
    out.param("prime", p);
    out.param("n", n);
    out.traces(vec![bernoulli_certificate(
        CertClaim::M3,
        &CertParams { p, n: Some(n), ..Default::default() },
    )]);
    Ok(())
}

// --- Wilton / mod 691 --------------------------------------------------------

fn check_wilton(params: &CheckParams, ctx: &RunCtx, out: &mut Outcome) {
    out.param("prime", 23);
    out.param("t_bound", params.t_bound);
    let delta = ctx.delta(params.t_bound);
    for t in 1..=params.t_bound {
        if kronecker(-23, t as i64).expect("t > 0") == -1
            && residue_mod_p(delta.coeff(t), 23).expect("integer") != 0
        {
            out.violations.push(format!("t={t}"));
        }
    }
}

fn check_mod691(params: &CheckParams, ctx: &RunCtx, out: &mut Outcome) {
    out.param("prime", 691);
    out.param("t_bound", params.t_bound);
    let delta = ctx.delta(params.t_bound);
    let g12 = ctx.g12(params.t_bound);
    match congruence_violations1(&delta, &g12, 691, |t| t >= 1) {
        Ok(viols) => out.violations.extend(viols.into_iter().map(|t| format!("t={t}"))),
        Err(e) => out.violations.push(format!("sweep error: {e}")),
    }
}

// --- Leech lattice, degree 1 -------------------------------------------------

fn check_leech23(params: &CheckParams, ctx: &RunCtx, out: &mut Outcome) {
    out.param("t_bound", params.t_bound);
    out.param("enum_bound", params.enum_bound);
    match leech_theta_identity_check(params.t_bound, params.enum_bound, ctx.exec) {
        Ok(report) => {
            out.violations.extend(
                report.identity_mismatches.iter().map(|t| format!("identity:t={t}")),
            );
            out.violations
                .extend(report.wilton_violations.iter().map(|t| format!("t={t}")));
            out.certificate = Some(json!({ "shell_counts": report.counts }));
        }
        Err(e) => out.violations.push(format!("enumeration error: {e}")),
    }
}

// --- Section 4 first approximation --------------------------------------------

fn check_padic(params: &CheckParams, ctx: &RunCtx, out: &mut Outcome) -> Result<(), CheckError> {
    let p = require_prime(CheckId::Padic, params)?;
    out.param("prime", p);
    out.param("t_bound", params.t_bound);
    out.param("det2_bound", params.det2_bound);
    if !is_prime(p) || p % 4 != 3 || p <= 7 {
        out.inapplicable(format!("needs a prime p > 7 with p ≡ 3 (mod 4), got {p}"));
        return Ok(());
    }
    let k = ((p + 1) / 2) as u32;

    let eis = eis1_exec(k, params.t_bound, ctx.exec).expect("valid weight");
    let genus = genus_theta1(p, params.t_bound).expect("p ≡ 3 mod 4");
    match congruence_violations1(&eis, &genus, p, |_| true) {
        Ok(viols) => out.violations.extend(viols.into_iter().map(|t| format!("deg1:t={t}"))),
        Err(e) => out.violations.push(format!("deg1 sweep error: {e}")),
    }

    let eis2_table = ctx.eis2_det2_table(k, params.det2_bound);
    let genus2 = genus_theta2(p, Region2::Det2Classes(params.det2_bound), ctx.exec)
        .expect("p ≡ 3 mod 4");
    match congruence_violations2(&eis2_table, &genus2, p, |_| true) {
        Ok(viols) => out.violations.extend(viols.into_iter().map(|t| format!("deg2:{}", t.key()))),
        Err(e) => out.violations.push(format!("deg2 sweep error: {e}")),
    }
    Ok(())
}

// --- Oracles -----------------------------------------------------------------

fn check_ring_identity(params: &CheckParams, ctx: &RunCtx, out: &mut Outcome) {
    out.param("trace_bound", params.trace_bound);
    out.param("t_bound", params.t_bound);

    let e4 = ctx.eis2_trace_table(4, params.trace_bound);
    let e8 = ctx.eis2_trace_table(8, params.trace_bound);
    let prod = e4.multiply(&e4).expect("trace regions");
    for t in enumerate_psd(params.trace_bound) {
        let lhs = prod.coeff(&t).expect("in region");
        let rhs = e8.coeff(&t).expect("in region");
        if lhs != rhs {
            out.violations.push(format!("deg2:{}", t.key()));
        }
    }

    let e4_1 = eis1_exec(4, params.t_bound, ctx.exec).expect("valid weight");
    let e8_1 = eis1_exec(8, params.t_bound, ctx.exec).expect("valid weight");
    let prod1 = e4_1.multiply(&e4_1);
    for t in 0..=params.t_bound {
        if prod1.coeff(t) != e8_1.coeff(t) {
            out.violations.push(format!("deg1:t={t}"));
        }
    }
}

fn check_phi_consistency(params: &CheckParams, ctx: &RunCtx, out: &mut Outcome) {
    out.param("t_bound", params.t_bound);
    out.param("weights", json!([4, 6, 8, 10, 12, 14]));
    for k in [4u32, 6, 8, 10, 12, 14] {
        let e2 = ctx.eis2_trace_table(k, params.t_bound);
        let phi = e2.phi_op().expect("trace region");
        let e1 = eis1_exec(k, params.t_bound, ctx.exec).expect("valid weight");
        for t in 0..=params.t_bound {
            if phi.coeff(t) != e1.coeff(t) {
                out.violations.push(format!("k={k}:t={t}"));
            }
        }
    }
}

fn check_hurwitz(params: &CheckParams, out: &mut Outcome) {
    out.param("n_bound", params.t_bound);
    for n in 3..=params.t_bound as u64 {
        if n % 4 == 1 || n % 4 == 2 {
            continue;
        }
        if cohen_h(1, n) != hurwitz_weighted_count(n) {
            out.violations.push(format!("N={n}"));
        }
    }
}

fn check_classnum(params: &CheckParams, out: &mut Outcome) {
    out.param("p_bound", params.t_bound);
    for p in (11..params.t_bound as u64).filter(|&p| is_prime(p) && p % 4 == 3) {
        let lhs = residue_mod_p(&bernoulli(((p + 1) / 2) as u32), p).expect("p-integral");
        let h = class_list(-(p as i64)).expect("valid").class_number();
        let rhs = residue_mod_p(&(rat_int(-(h as i64)) / rat_int(2)), p).expect("p odd");
        if lhs != rhs {
            out.violations.push(format!("p={p}"));
        }
    }
}
