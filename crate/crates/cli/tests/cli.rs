//! End-to-end behavior of the `siegel` binary: exit codes, output formats,
//! config handling, cache fallback, and the FAIL path.

use std::path::Path;
use std::process::{Command, Output};

fn siegel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siegel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn bernoulli_subcommand() {
    let out = siegel(&["bernoulli", "--upto", "12"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("B_12 = -691/2730"));
    assert!(text.contains("B_1 = -1/2"));

    let out = siegel(&["--format", "json", "bernoulli", "--upto", "4"]);
    let rows: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(rows[4]["value"], "-1/30");
}

#[test]
fn eis_subcommand_writes_expansion_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e4.json");
    let out = siegel(&[
        "eis",
        "--degree",
        "2",
        "--weight",
        "4",
        "--bound",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed = siegel_core::qexp::from_json_str(text.trim()).unwrap();
    match parsed {
        siegel_core::qexp::Expansion::Two(e2) => {
            let v = e2
                .coeff(&siegel_core::quadforms::BinaryQf::new(1, 1, 1))
                .unwrap();
            assert_eq!(v, siegel_core::arith::rat_int(13440));
        }
        _ => panic!("expected a degree-2 expansion"),
    }
    // bit-exact round trip through the library serializer
    assert_eq!(
        siegel_core::qexp::to_json_string(
            &siegel_core::qexp::from_json_str(text.trim()).unwrap()
        )
        .unwrap(),
        text.trim()
    );
}

#[test]
fn theta_subcommand_counts() {
    let out = siegel(&["--format", "json", "theta", "--lattice", "leech", "--max-norm", "4"]);
    assert!(out.status.success());
    let counts: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(counts["0"], 1);
    assert_eq!(counts["4"], 196_560);
    let out = siegel(&["theta", "--lattice", "e8", "--max-norm", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_check_is_usage_error() {
    let out = siegel(&["verify", "NO_SUCH_CHECK"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("UNKNOWN_CHECK"));
}

#[test]
fn inapplicable_hypothesis_exits_zero() {
    let out = siegel(&["--format", "json", "verify", "M1", "--prime", "13", "--t-bound", "10"]);
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(reports[0]["status"], "INAPPLICABLE");
}

#[test]
fn report_json_schema_and_determinism() {
    let args = ["--format", "json", "verify", "HURWITZ_ORACLE", "--t-bound", "120"];
    let a = stdout(&siegel(&args));
    let b = stdout(&siegel(&args));
    let mut ja: serde_json::Value = serde_json::from_str(a.trim()).unwrap();
    let mut jb: serde_json::Value = serde_json::from_str(b.trim()).unwrap();
    for j in [&mut ja, &mut jb] {
        j[0]["elapsed_ms"] = serde_json::json!(0);
    }
    assert_eq!(ja, jb);
    let report = &ja[0];
    for field in
        ["check", "params", "status", "violations", "violation_count", "certificate", "elapsed_ms", "artifact_version"]
    {
        assert!(report.get(field).is_some(), "missing field {field}");
    }
    assert_eq!(report["status"], "PASS");
}

#[test]
fn config_file_drives_suite() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.json");
    std::fs::write(
        &cfg,
        r#"{"checks":[{"id":"M3","params":{"prime":7,"n":2}},{"id":"CLASSNUM_CONGRUENCE","params":{"t_bound":50}}],"jobs":2}"#,
    )
    .unwrap();
    let out = siegel(&["--format", "json", "verify", "all", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let reports: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 2);
    assert_eq!(reports[0]["check"], "M3");
    assert_eq!(reports[1]["check"], "CLASSNUM_CONGRUENCE");
}

#[test]
fn empty_config_check_list_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.json");
    std::fs::write(&cfg, r#"{"checks":[]}"#).unwrap();
    let out = siegel(&["verify", "all", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn malformed_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"checks\": [\n").unwrap();
    let out = siegel(&["verify", "all", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn csv_format_has_header() {
    let out = siegel(&["--format", "csv", "verify", "M3", "--prime", "7", "--n", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("check,status,params,violation_count,elapsed_ms,violation"));
    assert!(text.lines().nth(1).unwrap().starts_with("M3,PASS"));
}

#[test]
fn corrupted_coefficient_fails_with_offending_index() {
    // poison the expansion cache with a wrong value at class (1,1,1), then
    // run the M1 sweep against it: the check must FAIL listing that triple
    let dir = tempfile::tempdir().unwrap();
    let warmup = siegel(&[
        "--cache",
        dir.path().to_str().unwrap(),
        "verify",
        "M1",
        "--prime",
        "11",
        "--det2-bound",
        "20",
        "--t-bound",
        "50",
    ]);
    assert!(warmup.status.success());

    let cache_file = dir.path().join("eis2-det2_d2_w6_b20_v1.json");
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cache_file).unwrap()).unwrap();
    doc["coefficients"]["1,1,1"] = serde_json::json!("1");
    std::fs::write(&cache_file, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = siegel(&[
        "--cache",
        dir.path().to_str().unwrap(),
        "--format",
        "json",
        "verify",
        "M1",
        "--prime",
        "11",
        "--det2-bound",
        "20",
        "--t-bound",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let reports: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(reports[0]["status"], "FAIL");
    let violations = reports[0]["violations"].as_array().unwrap();
    assert!(violations.iter().any(|v| v == "1,1,1"), "{violations:?}");
    assert_eq!(reports[0]["violation_count"], 1);
}

#[test]
fn cache_round_trip_preserves_reports(){
    let dir = tempfile::tempdir().unwrap();
    let args = |d: &Path| {
        vec![
            "--cache".to_string(),
            d.to_str().unwrap().to_string(),
            "--format".to_string(),
            "json".to_string(),
            "verify".to_string(),
            "M2".to_string(),
            "--prime".to_string(),
            "7".to_string(),
            "--det2-bound".to_string(),
            "60".to_string(),
            "--disc-bound".to_string(),
            "20".to_string(),
        ]
    };
    let run = |d: &Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_siegel"))
            .args(args(d))
            .output()
            .unwrap();
        assert!(out.status.success());
        let mut v: serde_json::Value =
            serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
        v[0]["elapsed_ms"] = serde_json::json!(0);
        v
    };
    let cold = run(dir.path());
    assert!(dir.path().join("eis2-det2_d2_w8_b60_v1.json").exists());
    let warm = run(dir.path());
    assert_eq!(cold, warm);
}

#[test]
fn sequential_jobs_flag_matches_parallel() {
    let base = ["--format", "json", "verify", "PADIC", "--prime", "11", "--t-bound", "60", "--det2-bound", "40"];
    let par = stdout(&siegel(&base));
    let mut seq_args = vec!["--jobs", "1"];
    seq_args.extend_from_slice(&base);
    let seq = stdout(&siegel(&seq_args));
    let mut jp: serde_json::Value = serde_json::from_str(par.trim()).unwrap();
    let mut js: serde_json::Value = serde_json::from_str(seq.trim()).unwrap();
    jp[0]["elapsed_ms"] = serde_json::json!(0);
    js[0]["elapsed_ms"] = serde_json::json!(0);
    assert_eq!(jp, js);
}
