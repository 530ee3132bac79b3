//! Check outcome type and the text/JSON/CSV emitters.
//!
//! JSON output is byte-reproducible for identical inputs: parameter maps are
//! ordered, violation lists come from deterministic sweeps, and only
//! `elapsed_ms` varies between runs (consumers comparing reports zero it
//! first).

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "INAPPLICABLE")]
    Inapplicable,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Status::Pass => write!(f, "PASS"),
            Status::Fail => write!(f, "FAIL"),
            Status::Inapplicable => write!(f, "INAPPLICABLE"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CongruenceReport {
    pub check: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub status: Status,
    /// Violating indices, capped; `violation_count` holds the full count.
    pub violations: Vec<String>,
    pub violation_count: u64,
    pub certificate: Option<serde_json::Value>,
    pub elapsed_ms: u64,
    pub artifact_version: String,
}

impl CongruenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

pub fn emit_report(report: &CongruenceReport, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", report.to_json()),
        Format::Text => {
            let params = report
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(
                out,
                "{:<20} {:<12} {params} ({} ms)",
                report.check, report.status, report.elapsed_ms
            )?;
            if report.violation_count > 0 {
                writeln!(
                    out,
                    "  {} violation(s){}:",
                    report.violation_count,
                    if report.violations.len() < report.violation_count as usize {
                        format!(", first {}", report.violations.len())
                    } else {
                        String::new()
                    }
                )?;
                for v in &report.violations {
                    writeln!(out, "    {v}")?;
                }
            }
            if let Some(cert) = &report.certificate {
                if let Some(traces) = cert.get("traces").and_then(|t| t.as_array()) {
                    for trace in traces {
                        let claim = trace.get("claim").and_then(|c| c.as_str()).unwrap_or("?");
                        let verdict =
                            trace.get("verdict").and_then(|v| v.as_str()).unwrap_or("?");
                        writeln!(out, "  certificate {claim}: {verdict}")?;
                        if let Some(factors) = trace.get("factors").and_then(|f| f.as_array()) {
                            for factor in factors {
                                writeln!(
                                    out,
                                    "    {} = {}  ord_p = {}",
                                    factor.get("expr").and_then(|x| x.as_str()).unwrap_or("?"),
                                    factor.get("value").and_then(|x| x.as_str()).unwrap_or("?"),
                                    factor
                                        .get("valuation")
                                        .and_then(|x| x.as_str())
                                        .unwrap_or("?"),
                                )?;
                            }
                        }
                    }
                }
            }
            Ok(())
        }
        Format::Csv => {
            emit_csv_rows(report, out)
        }
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn emit_csv_rows(report: &CongruenceReport, out: &mut dyn Write) -> io::Result<()> {
    let params = report
        .params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";");
    if report.violations.is_empty() {
        writeln!(
            out,
            "{},{},{},{},{},",
            csv_quote(&report.check),
            report.status,
            csv_quote(&params),
            report.violation_count,
            report.elapsed_ms
        )
    } else {
        for v in &report.violations {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                csv_quote(&report.check),
                report.status,
                csv_quote(&params),
                report.violation_count,
                report.elapsed_ms,
                csv_quote(v)
            )?;
        }
        Ok(())
    }
}

pub const CSV_HEADER: &str = "check,status,params,violation_count,elapsed_ms,violation";

pub fn emit_reports(
    reports: &[CongruenceReport],
    format: Format,
    out: &mut dyn Write,
) -> io::Result<()> {
    match format {
        Format::Json => {
            let all: Vec<&CongruenceReport> = reports.iter().collect();
            writeln!(out, "{}", serde_json::to_string(&all).expect("reports serialize"))
        }
        Format::Text => {
            for r in reports {
                emit_report(r, Format::Text, out)?;
            }
            let pass = reports.iter().filter(|r| r.status == Status::Pass).count();
            let fail = reports.iter().filter(|r| r.status == Status::Fail).count();
            let na = reports.iter().filter(|r| r.status == Status::Inapplicable).count();
            writeln!(out, "summary: {pass} PASS, {fail} FAIL, {na} INAPPLICABLE")
        }
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in reports {
                emit_report(r, Format::Csv, out)?;
            }
            Ok(())
        }
    }
}

/// Exit status contract: 0 all PASS/INAPPLICABLE, 1 any FAIL.
pub fn exit_code(reports: &[CongruenceReport]) -> i32 {
    if reports.iter().any(|r| r.status == Status::Fail) {
        1
    } else {
        0
    }
}
