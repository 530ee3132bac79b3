//! Check registry, report emission, configuration and expansion cache for
//! the `siegel` command-line verifier.
//!
//! Every in-scope congruence statement is a named check producing a
//! [`report::CongruenceReport`]: `PASS` when every swept index satisfies the
//! congruence and every certificate verdict holds, `FAIL` with the violating
//! indices otherwise, and `INAPPLICABLE` when the statement's hypotheses
//! reject the parameters (a hypothesis failure is never a `FAIL`).

pub mod cache;
pub mod checks;
pub mod config;
pub mod report;

pub use checks::{default_suite, run_check, run_suite, CheckError, CheckId, CheckParams, RunCtx};
pub use report::{emit_report, emit_reports, CongruenceReport, Format, Status};
