//! Truncated Fourier expansions of degree 1 and 2.
//!
//! Degree-1 expansions are plain coefficient vectors indexed by `t`.
//! Degree-2 expansions index by [`BinaryQf`] and come in two storage
//! flavours with the same query interface:
//!
//! - class tables (built from coefficient formulas, which are GL2-class
//!   functions): one value per canonical class representative, arbitrary
//!   indices answered through [`gl2_canonical`];
//! - dense tables (products, linear combinations, loaded JSON): every psd
//!   index in the truncation region stored explicitly, absent means zero.
//!
//! Degree-2 truncation is by trace (trace is subadditive, so the region is
//! closed under the index addition that multiplication needs); theorem
//! sweeps use determinant-bounded class regions instead and are marked as
//! such — those lack rank-1 indices, so the Φ-operator refuses them.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{format_rat, parse_rat, rat, residue_mod_p, ArithError, Rat};
use crate::exec::{self, Exec};
use crate::quadforms::{enumerate_psd, gl2_canonical, BinaryQf};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QexpError {
    #[error("mixed degrees")]
    MixedDegrees,
    #[error("DENOMINATOR_DIVISIBLE at index {index}: denominator divisible by {p}")]
    DenominatorDivisible { p: u64, index: String },
    #[error("index {index} outside the truncation region")]
    OutOfRegion { index: String },
    #[error("operation needs trace-truncated expansions")]
    NeedsTraceRegion,
    #[error("expansions have incompatible regions")]
    RegionMismatch,
    #[error("cannot parse expansion JSON: {0}")]
    Parse(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Which vanishing property [`kernel_report2`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    /// Coefficients at positive definite `T` with `det2(T) != 0 mod p` must
    /// vanish mod p.
    ThetaKernel,
    /// Coefficients at all positive definite `T` must vanish mod p.
    Singular,
}

// ---------------------------------------------------------------------------
// Degree 1
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion1 {
    label: String,
    coeffs: Vec<Rat>,
}

impl Expansion1 {
    pub fn new(label: impl Into<String>, coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty());
        Expansion1 { label: label.into(), coeffs }
    }

    pub fn from_fn(label: impl Into<String>, t_max: u32, f: impl Fn(u32) -> Rat) -> Self {
        Expansion1 { label: label.into(), coeffs: (0..=t_max).map(f).collect() }
    }

    pub fn from_fn_exec(
        label: impl Into<String>,
        t_max: u32,
        ex: Exec,
        f: impl Fn(u32) -> Rat + Sync + Send,
    ) -> Self {
        let coeffs = exec::map_range(ex, t_max as usize + 1, |t| f(t as u32));
        Expansion1 { label: label.into(), coeffs }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn t_max(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn coeff(&self, t: u32) -> &Rat {
        &self.coeffs[t as usize]
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Theta operator: coefficient at `t` scaled by `det(T) = t`.
    pub fn theta_op(&self) -> Expansion1 {
        let coeffs =
            self.coeffs.iter().enumerate().map(|(t, a)| a * rat(t as i64, 1)).collect();
        Expansion1 { label: format!("Theta({})", self.label), coeffs }
    }

    /// Truncated Cauchy product; the result keeps the smaller bound.
    pub fn multiply(&self, other: &Expansion1) -> Expansion1 {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![Rat::zero(); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if !other.coeffs[j].is_zero() {
                    out[i + j] += &self.coeffs[i] * &other.coeffs[j];
                }
            }
        }
        Expansion1 { label: format!("({})*({})", self.label, other.label), coeffs: out }
    }

    pub fn reduce_mod_p(&self, p: u64) -> Result<Vec<u64>, QexpError> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(t, a)| {
                residue_mod_p(a, p).map_err(|e| match e {
                    ArithError::DenominatorDivisible { p } => {
                        QexpError::DenominatorDivisible { p, index: t.to_string() }
                    }
                    other => QexpError::Arith(other),
                })
            })
            .collect()
    }
}

/// Exact linear combination of equal-degree expansions; the result keeps the
/// smallest bound.
pub fn linear_combine1(terms: &[(Rat, &Expansion1)]) -> Expansion1 {
    assert!(!terms.is_empty());
    let n = terms.iter().map(|(_, e)| e.coeffs.len()).min().unwrap();
    let mut out = vec![Rat::zero(); n];
    for (scale, e) in terms {
        if scale.is_zero() {
            continue;
        }
        for (acc, c) in out.iter_mut().zip(&e.coeffs) {
            *acc += scale * c;
        }
    }
    let label = terms.iter().map(|(_, e)| e.label.as_str()).collect::<Vec<_>>().join(" + ");
    Expansion1 { label: format!("lin[{label}]"), coeffs: out }
}

/// Indices `1 <= t <= common bound` passing `filter` where the two
/// expansions disagree mod p. Index 0 is included as well.
pub fn congruence_violations1(
    f: &Expansion1,
    g: &Expansion1,
    p: u64,
    filter: impl Fn(u32) -> bool,
) -> Result<Vec<u32>, QexpError> {
    let n = f.coeffs.len().min(g.coeffs.len());
    let mut out = Vec::new();
    for t in 0..n as u32 {
        if !filter(t) {
            continue;
        }
        let a = residue1(f, t, p)?;
        let b = residue1(g, t, p)?;
        if a != b {
            out.push(t);
        }
    }
    Ok(out)
}

fn residue1(e: &Expansion1, t: u32, p: u64) -> Result<u64, QexpError> {
    residue_mod_p(e.coeff(t), p).map_err(|err| match err {
        ArithError::DenominatorDivisible { p } => {
            QexpError::DenominatorDivisible { p, index: t.to_string() }
        }
        other => QexpError::Arith(other),
    })
}

/// Degree-1 kernel sweep: positive indices whose coefficient fails the
/// vanishing required by `mode` (`det(T) = t` at degree 1).
pub fn kernel_report1(
    f: &Expansion1,
    p: u64,
    mode: KernelMode,
) -> Result<Vec<u32>, QexpError> {
    let mut out = Vec::new();
    for t in 1..=f.t_max() {
        let relevant = match mode {
            KernelMode::ThetaKernel => t as u64 % p != 0,
            KernelMode::Singular => true,
        };
        if relevant && residue1(f, t, p)? != 0 {
            out.push(t);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Degree 2
// ---------------------------------------------------------------------------

/// Truncation region of a degree-2 expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region2 {
    /// All psd indices with `trace <= bound` (the complete region).
    Trace(u32),
    /// GL2-reduced positive definite classes with `det2 <= bound`
    /// (theorem-sweep region; no rank-1 indices).
    Det2Classes(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Storage {
    Classes,
    Dense,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion2 {
    label: String,
    region: Region2,
    storage: Storage,
    values: BTreeMap<BinaryQf, Rat>,
}

/// Canonical class representatives contained in a region.
pub fn region_class_reps(region: Region2) -> Vec<BinaryQf> {
    match region {
        Region2::Trace(tb) => {
            let tb = tb as i64;
            let mut keys = vec![BinaryQf::ZERO];
            for t in 1..=tb {
                keys.push(BinaryQf::new(t, 0, 0));
            }
            for a in 1..=tb / 2 {
                for b in 0..=a {
                    for c in a..=(tb - a) {
                        if 4 * a * c > b * b {
                            keys.push(BinaryQf::new(a, b, c));
                        }
                    }
                }
            }
            keys
        }
        Region2::Det2Classes(db) => crate::quadforms::enumerate_pos_def_reduced(db),
    }
}

impl Expansion2 {
    /// Build a class table by evaluating a GL2-class function on every class
    /// representative in the region.
    pub fn from_class_fn(
        label: impl Into<String>,
        region: Region2,
        ex: Exec,
        f: impl Fn(&BinaryQf) -> Rat + Sync + Send,
    ) -> Self {
        let keys = region_class_reps(region);
        let values = exec::map_collect(ex, keys, |k| (k, f(&k)));
        Expansion2 {
            label: label.into(),
            region,
            storage: Storage::Classes,
            values: values.into_iter().collect(),
        }
    }

    /// Reconstruct a class table from stored values (the cache path). The
    /// key set must be exactly the region's class representatives.
    pub fn from_stored_classes(
        label: impl Into<String>,
        region: Region2,
        values: BTreeMap<BinaryQf, Rat>,
    ) -> Result<Self, QexpError> {
        let expected = region_class_reps(region);
        if expected.len() != values.len() || expected.iter().any(|k| !values.contains_key(k)) {
            return Err(QexpError::RegionMismatch);
        }
        Ok(Expansion2 { label: label.into(), region, storage: Storage::Classes, values })
    }

    /// Build a dense table over the full psd trace region.
    pub fn dense_from_fn(
        label: impl Into<String>,
        trace_bound: u32,
        ex: Exec,
        f: impl Fn(&BinaryQf) -> Rat + Sync + Send,
    ) -> Self {
        let keys = enumerate_psd(trace_bound);
        let values = exec::map_collect(ex, keys, |k| (k, f(&k)));
        Expansion2 {
            label: label.into(),
            region: Region2::Trace(trace_bound),
            storage: Storage::Dense,
            values: values.into_iter().collect(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn region(&self) -> Region2 {
        self.region
    }

    pub fn trace_bound(&self) -> Option<u32> {
        match self.region {
            Region2::Trace(tb) => Some(tb),
            Region2::Det2Classes(_) => None,
        }
    }

    fn in_region(&self, t: &BinaryQf) -> bool {
        match self.region {
            Region2::Trace(tb) => t.is_psd() && t.trace() <= tb as i64,
            Region2::Det2Classes(db) => t.is_pos_def() && t.det2() as u64 <= db,
        }
    }

    /// Coefficient at an arbitrary region index.
    pub fn coeff(&self, t: &BinaryQf) -> Result<Rat, QexpError> {
        if !self.in_region(t) {
            return Err(QexpError::OutOfRegion { index: t.key() });
        }
        let looked_up = match self.storage {
            Storage::Dense => self.values.get(t),
            Storage::Classes => {
                let canonical = gl2_canonical(*t)
                    .map_err(|_| QexpError::OutOfRegion { index: t.key() })?;
                self.values.get(&canonical)
            }
        };
        Ok(looked_up.cloned().unwrap_or_else(Rat::zero))
    }

    /// The stored (index, value) pairs, in deterministic index order.
    pub fn stored(&self) -> impl Iterator<Item = (&BinaryQf, &Rat)> {
        self.values.iter()
    }

    /// Theta operator: coefficient at `T` scaled by `det(T) = det2/4`.
    pub fn theta_op(&self) -> Expansion2 {
        let values = self
            .values
            .iter()
            .map(|(k, v)| (*k, v * k.det_rat()))
            .collect();
        Expansion2 {
            label: format!("Theta({})", self.label),
            region: self.region,
            storage: self.storage,
            values,
        }
    }

    /// Siegel Φ-operator: `a(Φ F, t) = a(F, (t,0,0))`. Requires the complete
    /// trace region.
    pub fn phi_op(&self) -> Result<Expansion1, QexpError> {
        let tb = self.trace_bound().ok_or(QexpError::NeedsTraceRegion)?;
        let mut coeffs = Vec::with_capacity(tb as usize + 1);
        for t in 0..=tb as i64 {
            coeffs.push(self.coeff(&BinaryQf::new(t, 0, 0))?);
        }
        Ok(Expansion1 { label: format!("Phi({})", self.label), coeffs })
    }

    /// Convolution product `(F*G)(T) = sum_{T1+T2=T, both psd} F(T1) G(T2)`,
    /// stored densely over the smaller trace region.
    pub fn multiply(&self, other: &Expansion2) -> Result<Expansion2, QexpError> {
        let tb = self
            .trace_bound()
            .and_then(|a| other.trace_bound().map(|b| a.min(b)))
            .ok_or(QexpError::NeedsTraceRegion)?;
        let all = enumerate_psd(tb);
        let mut values = BTreeMap::new();
        for t in &all {
            let mut acc = Rat::zero();
            for t1 in &all {
                if t1.trace() > t.trace() {
                    break; // enumerate_psd is ordered by trace
                }
                let t2 = BinaryQf::new(t.a - t1.a, t.b - t1.b, t.c - t1.c);
                if !t2.is_psd() {
                    continue;
                }
                let a = self.coeff(t1)?;
                if a.is_zero() {
                    continue;
                }
                acc += a * other.coeff(&t2)?;
            }
            values.insert(*t, acc);
        }
        Ok(Expansion2 {
            label: format!("({})*({})", self.label, other.label),
            region: Region2::Trace(tb),
            storage: Storage::Dense,
            values,
        })
    }

    pub fn reduce_mod_p(&self, p: u64) -> Result<BTreeMap<BinaryQf, u64>, QexpError> {
        self.values
            .iter()
            .map(|(k, v)| {
                residue_mod_p(v, p)
                    .map(|r| (*k, r))
                    .map_err(|e| match e {
                        ArithError::DenominatorDivisible { p } => {
                            QexpError::DenominatorDivisible { p, index: k.key() }
                        }
                        other => QexpError::Arith(other),
                    })
            })
            .collect()
    }

    fn residue_at(&self, t: &BinaryQf, p: u64) -> Result<u64, QexpError> {
        let v = self.coeff(t)?;
        residue_mod_p(&v, p).map_err(|e| match e {
            ArithError::DenominatorDivisible { p } => {
                QexpError::DenominatorDivisible { p, index: t.key() }
            }
            other => QexpError::Arith(other),
        })
    }
}

/// Exact linear combination over a common trace region.
pub fn linear_combine2(terms: &[(Rat, &Expansion2)]) -> Result<Expansion2, QexpError> {
    assert!(!terms.is_empty());
    let mut tb = u32::MAX;
    for (_, e) in terms {
        tb = tb.min(e.trace_bound().ok_or(QexpError::NeedsTraceRegion)?);
    }
    let mut values = BTreeMap::new();
    for t in enumerate_psd(tb) {
        let mut acc = Rat::zero();
        for (scale, e) in terms {
            if !scale.is_zero() {
                acc += scale * e.coeff(&t)?;
            }
        }
        values.insert(t, acc);
    }
    let label = terms.iter().map(|(_, e)| e.label.as_str()).collect::<Vec<_>>().join(" + ");
    Ok(Expansion2 {
        label: format!("lin[{label}]"),
        region: Region2::Trace(tb),
        storage: Storage::Dense,
        values,
    })
}

/// Indices in the common region passing `filter` where the residues differ.
///
/// Trace regions compare over every psd index up to the smaller bound;
/// det2-class regions compare class representatives up to the smaller bound.
pub fn congruence_violations2(
    f: &Expansion2,
    g: &Expansion2,
    p: u64,
    filter: impl Fn(&BinaryQf) -> bool,
) -> Result<Vec<BinaryQf>, QexpError> {
    let indices: Vec<BinaryQf> = match (f.region, g.region) {
        (Region2::Trace(a), Region2::Trace(b)) => enumerate_psd(a.min(b)),
        (Region2::Det2Classes(a), Region2::Det2Classes(b)) => {
            crate::quadforms::enumerate_pos_def_reduced(a.min(b))
        }
        _ => return Err(QexpError::RegionMismatch),
    };
    let mut out = Vec::new();
    for t in indices {
        if !filter(&t) {
            continue;
        }
        if f.residue_at(&t, p)? != g.residue_at(&t, p)? {
            out.push(t);
        }
    }
    Ok(out)
}

/// Stored positive definite indices violating the vanishing property.
pub fn kernel_report2(
    f: &Expansion2,
    p: u64,
    mode: KernelMode,
) -> Result<Vec<BinaryQf>, QexpError> {
    let mut out = Vec::new();
    for (t, v) in f.stored() {
        if !t.is_pos_def() {
            continue;
        }
        let relevant = match mode {
            KernelMode::ThetaKernel => t.det2().rem_euclid(p as i64) != 0,
            KernelMode::Singular => true,
        };
        if !relevant {
            continue;
        }
        let r = residue_mod_p(v, p).map_err(|e| match e {
            ArithError::DenominatorDivisible { p } => {
                QexpError::DenominatorDivisible { p, index: t.key() }
            }
            other => QexpError::Arith(other),
        })?;
        if r != 0 {
            out.push(*t);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Either degree
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expansion {
    One(Expansion1),
    Two(Expansion2),
}

impl Expansion {
    pub fn degree(&self) -> u8 {
        match self {
            Expansion::One(_) => 1,
            Expansion::Two(_) => 2,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Expansion::One(e) => e.label(),
            Expansion::Two(e) => e.label(),
        }
    }

    pub fn theta_op(&self) -> Expansion {
        match self {
            Expansion::One(e) => Expansion::One(e.theta_op()),
            Expansion::Two(e) => Expansion::Two(e.theta_op()),
        }
    }

    pub fn phi_op(&self) -> Result<Expansion1, QexpError> {
        match self {
            Expansion::One(_) => Err(QexpError::MixedDegrees),
            Expansion::Two(e) => e.phi_op(),
        }
    }

    pub fn multiply(&self, other: &Expansion) -> Result<Expansion, QexpError> {
        match (self, other) {
            (Expansion::One(a), Expansion::One(b)) => Ok(Expansion::One(a.multiply(b))),
            (Expansion::Two(a), Expansion::Two(b)) => Ok(Expansion::Two(a.multiply(b)?)),
            _ => Err(QexpError::MixedDegrees),
        }
    }

    pub fn linear_combine(terms: &[(Rat, &Expansion)]) -> Result<Expansion, QexpError> {
        assert!(!terms.is_empty());
        match terms[0].1 {
            Expansion::One(_) => {
                let mut ts: Vec<(Rat, &Expansion1)> = Vec::with_capacity(terms.len());
                for (s, e) in terms {
                    match e {
                        Expansion::One(e1) => ts.push((s.clone(), e1)),
                        Expansion::Two(_) => return Err(QexpError::MixedDegrees),
                    }
                }
                Ok(Expansion::One(linear_combine1(&ts)))
            }
            Expansion::Two(_) => {
                let mut ts: Vec<(Rat, &Expansion2)> = Vec::with_capacity(terms.len());
                for (s, e) in terms {
                    match e {
                        Expansion::Two(e2) => ts.push((s.clone(), e2)),
                        Expansion::One(_) => return Err(QexpError::MixedDegrees),
                    }
                }
                Ok(Expansion::Two(linear_combine2(&ts)?))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON serialization (bit-exact round trip)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ExpansionJson {
    degree: u8,
    bound: u64,
    label: String,
    coefficients: BTreeMap<String, String>,
}

/// Serialize to the canonical JSON schema: `degree`, `bound`, `label`, and a
/// complete `coefficients` map keyed `"t"` (degree 1) or `"a,b,c"` (degree
/// 2) with `"num/den"` values. Degree-2 expansions must be trace-truncated
/// and are written densely over the whole region.
pub fn to_json_string(e: &Expansion) -> Result<String, QexpError> {
    let doc = match e {
        Expansion::One(e1) => ExpansionJson {
            degree: 1,
            bound: e1.t_max() as u64,
            label: e1.label.clone(),
            coefficients: e1
                .coeffs
                .iter()
                .enumerate()
                .map(|(t, v)| (t.to_string(), format_rat(v)))
                .collect(),
        },
        Expansion::Two(e2) => {
            let tb = e2.trace_bound().ok_or(QexpError::NeedsTraceRegion)?;
            let mut coefficients = BTreeMap::new();
            for t in enumerate_psd(tb) {
                coefficients.insert(t.key(), format_rat(&e2.coeff(&t)?));
            }
            ExpansionJson { degree: 2, bound: tb as u64, label: e2.label.clone(), coefficients }
        }
    };
    serde_json::to_string(&doc).map_err(|e| QexpError::Parse(e.to_string()))
}

pub fn from_json_str(s: &str) -> Result<Expansion, QexpError> {
    let doc: ExpansionJson =
        serde_json::from_str(s).map_err(|e| QexpError::Parse(e.to_string()))?;
    match doc.degree {
        1 => {
            let t_max = doc.bound as u32;
            let mut coeffs = vec![Rat::zero(); t_max as usize + 1];
            for (k, v) in &doc.coefficients {
                let t: u32 = k
                    .parse()
                    .map_err(|_| QexpError::Parse(format!("bad degree-1 index {k:?}")))?;
                if t > t_max {
                    return Err(QexpError::Parse(format!("index {t} beyond bound {t_max}")));
                }
                coeffs[t as usize] = parse_rat(v)?;
            }
            Ok(Expansion::One(Expansion1 { label: doc.label, coeffs }))
        }
        2 => {
            let tb = doc.bound as u32;
            let mut values = BTreeMap::new();
            for (k, v) in &doc.coefficients {
                let t = BinaryQf::parse_key(k)
                    .ok_or_else(|| QexpError::Parse(format!("bad degree-2 index {k:?}")))?;
                if !t.is_psd() || t.trace() > tb as i64 {
                    return Err(QexpError::Parse(format!("index {k} outside region")));
                }
                values.insert(t, parse_rat(v)?);
            }
            Ok(Expansion::Two(Expansion2 {
                label: doc.label,
                region: Region2::Trace(tb),
                storage: Storage::Dense,
                values,
            }))
        }
        d => Err(QexpError::Parse(format!("unsupported degree {d}"))),
    }
}
