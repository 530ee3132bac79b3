//! Suite configuration file: JSON with a check list, a job count, and an
//! optional cache directory.
//!
//! ```json
//! {
//!   "checks": [
//!     {"id": "M1", "params": {"prime": 11, "det2_bound": 4000}},
//!     {"id": "WILTON"}
//!   ],
//!   "jobs": 4,
//!   "cache_dir": "/tmp/siegel-cache"
//! }
//! ```
//!
//! Omitted parameters take the per-check defaults; a check with no `prime`
//! expands over its default prime set.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::checks::{expand, CheckId, CheckParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config check #{index}: {message}")]
    BadCheck { index: usize, message: String },
}

#[derive(Debug, Deserialize)]
struct RawConfig {
    checks: Vec<RawCheck>,
    #[serde(default)]
    jobs: Option<usize>,
    #[serde(default)]
    cache_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
struct RawCheck {
    id: String,
    #[serde(default)]
    params: Option<RawParams>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    prime: Option<u64>,
    det2_bound: Option<u64>,
    t_bound: Option<u32>,
    trace_bound: Option<u32>,
    disc_bound: Option<u64>,
    n: Option<u32>,
    enum_bound: Option<u32>,
    violation_cap: Option<usize>,
}

#[derive(Debug)]
pub struct SuiteConfig {
    pub specs: Vec<(CheckId, CheckParams)>,
    pub jobs: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

pub fn load_config(path: &std::path::Path) -> Result<SuiteConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<SuiteConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
        // serde_json errors carry line/column diagnostics in their Display
        ConfigError::Parse(e.to_string())
    })?;
    let mut specs = Vec::new();
    for (index, rc) in raw.checks.iter().enumerate() {
        let id = CheckId::from_str(&rc.id)
            .map_err(|e| ConfigError::BadCheck { index, message: e.to_string() })?;
        let mut params = CheckParams::defaults_for(id);
        if let Some(rp) = &rc.params {
            apply(&mut params, rp);
        }
        specs.extend(expand(id, &params));
    }
    Ok(SuiteConfig { specs, jobs: raw.jobs, cache_dir: raw.cache_dir })
}

fn apply(params: &mut CheckParams, raw: &RawParams) {
    if raw.prime.is_some() {
        params.prime = raw.prime;
    }
    if let Some(v) = raw.det2_bound {
        params.det2_bound = v;
    }
    if let Some(v) = raw.t_bound {
        params.t_bound = v;
    }
    if let Some(v) = raw.trace_bound {
        params.trace_bound = v;
    }
    if let Some(v) = raw.disc_bound {
        params.disc_bound = v;
    }
    if raw.n.is_some() {
        params.n = raw.n;
    }
    if let Some(v) = raw.enum_bound {
        params.enum_bound = v;
    }
    if let Some(v) = raw.violation_cap {
        params.violation_cap = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_expands() {
        let cfg = parse_config(
            r#"{"checks":[{"id":"M2","params":{"prime":7}},{"id":"M1"}],"jobs":2}"#,
        )
        .unwrap();
        // M2 pinned to one prime, M1 expanded over {11, 19, 23}
        assert_eq!(cfg.specs.len(), 4);
        assert_eq!(cfg.specs[0].0, CheckId::M2);
        assert_eq!(cfg.specs[0].1.prime, Some(7));
        assert_eq!(cfg.specs[1].1.prime, Some(11));
        assert_eq!(cfg.jobs, Some(2));
    }

    #[test]
    fn empty_check_list_is_valid() {
        let cfg = parse_config(r#"{"checks":[]}"#).unwrap();
        assert!(cfg.specs.is_empty());
    }

    #[test]
    fn unknown_check_rejected() {
        let err = parse_config(r#"{"checks":[{"id":"BOGUS"}]}"#).unwrap_err();
        assert!(err.to_string().contains("UNKNOWN_CHECK"));
    }

    #[test]
    fn parse_error_has_line_info() {
        let err = parse_config("{\n  \"checks\": [\n").unwrap_err();
        assert!(err.to_string().contains("line"));
    }

    #[test]
    fn unknown_param_rejected() {
        let err =
            parse_config(r#"{"checks":[{"id":"M1","params":{"primes":7}}]}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }
}
