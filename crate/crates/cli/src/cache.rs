//! On-disk expansion cache.
//!
//! Files are keyed by `(kind, degree, weight, bound)` and carry a format
//! version; anything that fails to load (missing, corrupt, wrong version,
//! wrong region) silently falls back to recomputation and is rewritten.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use siegel_core::arith::{format_rat, parse_rat};
use siegel_core::qexp::{Expansion1, Expansion2, Region2};
use siegel_core::quadforms::BinaryQf;

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct CacheDoc {
    format_version: u32,
    kind: String,
    degree: u8,
    weight: u32,
    bound: u64,
    label: String,
    coefficients: BTreeMap<String, String>,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> std::io::Result<Cache> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Cache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, kind: &str, degree: u8, weight: u32, bound: u64) -> PathBuf {
        self.dir.join(format!("{kind}_d{degree}_w{weight}_b{bound}_v{FORMAT_VERSION}.json"))
    }

    fn load(&self, kind: &str, degree: u8, weight: u32, bound: u64) -> Option<CacheDoc> {
        let text = fs::read_to_string(self.path(kind, degree, weight, bound)).ok()?;
        let doc: CacheDoc = serde_json::from_str(&text).ok()?;
        if doc.format_version != FORMAT_VERSION
            || doc.kind != kind
            || doc.degree != degree
            || doc.weight != weight
            || doc.bound != bound
        {
            return None;
        }
        Some(doc)
    }

    fn store(&self, doc: &CacheDoc) {
        // best effort: a failed write only costs a future recomputation
        let path = self.path(&doc.kind, doc.degree, doc.weight, doc.bound);
        if let Ok(text) = serde_json::to_string(doc) {
            let _ = fs::write(path, text);
        }
    }

    /// Degree-2 class table keyed by det2 bound.
    pub fn eis2_det2(
        &self,
        weight: u32,
        det2_bound: u64,
        compute: impl FnOnce() -> Expansion2,
    ) -> Expansion2 {
        let kind = "eis2-det2";
        if let Some(doc) = self.load(kind, 2, weight, det2_bound) {
            if let Some(exp) = doc_to_classes(&doc, Region2::Det2Classes(det2_bound)) {
                return exp;
            }
        }
        let exp = compute();
        self.store(&classes_to_doc(kind, weight, det2_bound, &exp));
        exp
    }

    /// Degree-2 class table keyed by trace bound.
    pub fn eis2_trace(
        &self,
        weight: u32,
        trace_bound: u32,
        compute: impl FnOnce() -> Expansion2,
    ) -> Expansion2 {
        let kind = "eis2-trace";
        if let Some(doc) = self.load(kind, 2, weight, trace_bound as u64) {
            if let Some(exp) = doc_to_classes(&doc, Region2::Trace(trace_bound)) {
                return exp;
            }
        }
        let exp = compute();
        self.store(&classes_to_doc(kind, weight, trace_bound as u64, &exp));
        exp
    }

    /// Degree-1 expansion keyed by kind and t bound.
    pub fn deg1(
        &self,
        kind: &str,
        weight: u32,
        t_max: u32,
        compute: impl FnOnce() -> Expansion1,
    ) -> Expansion1 {
        if let Some(doc) = self.load(kind, 1, weight, t_max as u64) {
            if let Some(exp) = doc_to_deg1(&doc, t_max) {
                return exp;
            }
        }
        let exp = compute();
        let doc = CacheDoc {
            format_version: FORMAT_VERSION,
            kind: kind.to_string(),
            degree: 1,
            weight,
            bound: t_max as u64,
            label: exp.label().to_string(),
            coefficients: exp
                .coeffs()
                .iter()
                .enumerate()
                .map(|(t, v)| (t.to_string(), format_rat(v)))
                .collect(),
        };
        self.store(&doc);
        exp
    }
}

fn classes_to_doc(kind: &str, weight: u32, bound: u64, exp: &Expansion2) -> CacheDoc {
    CacheDoc {
        format_version: FORMAT_VERSION,
        kind: kind.to_string(),
        degree: 2,
        weight,
        bound,
        label: exp.label().to_string(),
        coefficients: exp.stored().map(|(k, v)| (k.key(), format_rat(v))).collect(),
    }
}

fn doc_to_classes(doc: &CacheDoc, region: Region2) -> Option<Expansion2> {
    let mut values = BTreeMap::new();
    for (k, v) in &doc.coefficients {
        values.insert(BinaryQf::parse_key(k)?, parse_rat(v).ok()?);
    }
    Expansion2::from_stored_classes(doc.label.clone(), region, values).ok()
}

fn doc_to_deg1(doc: &CacheDoc, t_max: u32) -> Option<Expansion1> {
    let mut coeffs = vec![siegel_core::Rat::from_integer(0.into()); t_max as usize + 1];
    let mut seen = 0usize;
    for (k, v) in &doc.coefficients {
        let t: usize = k.parse().ok()?;
        if t > t_max as usize {
            return None;
        }
        coeffs[t] = parse_rat(v).ok()?;
        seen += 1;
    }
    if seen != t_max as usize + 1 {
        return None;
    }
    Some(Expansion1::new(doc.label.clone(), coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use siegel_core::eisenstein::eis2_det2;
    use siegel_core::Exec;

    #[test]
    fn round_trip_and_corruption_fallback() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        let fresh = cache.eis2_det2(6, 20, || eis2_det2(6, 20, Exec::Sequential).unwrap());
        let cached = cache.eis2_det2(6, 20, || panic!("must hit cache"));
        for (a, b) in fresh.stored().zip(cached.stored()) {
            assert_eq!(a, b);
        }
        // corrupt the file; loader must fall back to recomputation
        let path = cache.path("eis2-det2", 2, 6, 20);
        fs::write(&path, "{not json").unwrap();
        let recomputed = cache.eis2_det2(6, 20, || eis2_det2(6, 20, Exec::Sequential).unwrap());
        for (a, b) in fresh.stored().zip(recomputed.stored()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn deg1_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        let fresh = cache.deg1("delta", 12, 50, || siegel_core::eisenstein::delta_expansion(50));
        let cached = cache.deg1("delta", 12, 50, || panic!("must hit cache"));
        assert_eq!(fresh.coeffs(), cached.coeffs());
    }
}
