//! `siegel` — exact verification of mod-p congruences for Eisenstein series,
//! Delta, and lattice theta series at degrees 1 and 2, plus the
//! Bernoulli-factor certificates standing in for the higher-degree claims.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};

use siegel_cli::cache::Cache;
use siegel_cli::checks::{default_suite, expand, run_suite, CheckId, CheckParams, RunCtx};
use siegel_cli::config::load_config;
use siegel_cli::report::{self, emit_reports, Format};
use siegel_core::arith::{bernoulli, format_rat};
use siegel_core::eisenstein::{eis1_exec, eis2_exec};
use siegel_core::lattices::{leech_lattice, short_vector_counts_exec};
use siegel_core::qexp::{to_json_string, Expansion};
use siegel_core::Exec;

#[derive(Parser)]
#[command(
    name = "siegel",
    version,
    about = "Exact mod-p congruence checks for Eisenstein and theta series"
)]
struct Cli {
    /// Output format for reports and tables.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Worker threads (default: all cores; 1 forces sequential execution).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Expansion cache directory.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Print Bernoulli numbers B_0 .. B_M.
    Bernoulli {
        #[arg(long)]
        upto: u32,
    },
    /// Compute an Eisenstein expansion and emit its JSON.
    Eis {
        /// 1 or 2.
        #[arg(long)]
        degree: u8,
        /// Even weight >= 4.
        #[arg(long)]
        weight: u32,
        /// t bound (degree 1) or trace bound (degree 2).
        #[arg(long)]
        bound: u32,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate lattice shell counts.
    Theta {
        #[arg(long, default_value = "leech")]
        lattice: String,
        #[arg(long)]
        max_norm: u64,
    },
    /// Run one verification check (or `all`).
    Verify {
        /// Check id (M1, M2, M3, WILTON, MOD691, LEECH23, PADIC,
        /// RING_IDENTITY, PHI_CONSISTENCY, HURWITZ_ORACLE,
        /// CLASSNUM_CONGRUENCE) or `all`.
        check: String,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long)]
        det2_bound: Option<u64>,
        #[arg(long)]
        t_bound: Option<u32>,
        #[arg(long)]
        trace_bound: Option<u32>,
        #[arg(long)]
        disc_bound: Option<u64>,
        /// Degree parameter for M3.
        #[arg(long)]
        n: Option<u32>,
        /// Leech enumeration bound (t index; norm = 2t).
        #[arg(long)]
        enum_bound: Option<u32>,
        /// Suite configuration file (only with `verify all`).
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            // usage / configuration errors
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let format: Format = cli.format.into();
    let stdout = std::io::stdout();

    match cli.cmd {
        Cmd::Bernoulli { upto } => {
            let exec = setup_exec(cli.jobs, None)?;
            let _ = exec;
            let mut out = stdout.lock();
            match format {
                Format::Json => {
                    let rows: Vec<serde_json::Value> = (0..=upto)
                        .map(|m| {
                            serde_json::json!({ "m": m, "value": format_rat(&bernoulli(m)) })
                        })
                        .collect();
                    writeln!(out, "{}", serde_json::to_string(&rows)?)?;
                }
                Format::Csv => {
                    writeln!(out, "m,value")?;
                    for m in 0..=upto {
                        writeln!(out, "{m},{}", format_rat(&bernoulli(m)))?;
                    }
                }
                Format::Text => {
                    for m in 0..=upto {
                        writeln!(out, "B_{m} = {}", format_rat(&bernoulli(m)))?;
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Eis { degree, weight, bound, out } => {
            let exec = setup_exec(cli.jobs, None)?;
            let expansion = match degree {
                1 => Expansion::One(eis1_exec(weight, bound, exec)?),
                2 => Expansion::Two(eis2_exec(weight, bound, exec)?),
                d => return Err(format!("degree must be 1 or 2, got {d}").into()),
            };
            let json = to_json_string(&expansion)?;
            match out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => writeln!(stdout.lock(), "{json}")?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Theta { lattice, max_norm } => {
            if lattice != "leech" {
                return Err(format!("unknown lattice {lattice:?} (supported: leech)").into());
            }
            let exec = setup_exec(cli.jobs, None)?;
            let counts = short_vector_counts_exec(leech_lattice(), max_norm, exec);
            let mut out = stdout.lock();
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&counts)?)?,
                Format::Csv => {
                    writeln!(out, "norm,count")?;
                    for (norm, count) in &counts {
                        writeln!(out, "{norm},{count}")?;
                    }
                }
                Format::Text => {
                    for (norm, count) in &counts {
                        writeln!(out, "norm {norm}: {count}")?;
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify {
            check,
            prime,
            det2_bound,
            t_bound,
            trace_bound,
            disc_bound,
            n,
            enum_bound,
            config,
        } => {
            let (specs, cfg_jobs, cfg_cache) = if check == "all" {
                match config {
                    Some(path) => {
                        let cfg = load_config(&path)?;
                        (cfg.specs, cfg.jobs, cfg.cache_dir)
                    }
                    None => (default_suite(), None, None),
                }
            } else {
                if config.is_some() {
                    return Err("--config is only valid with `verify all`".into());
                }
                let id = CheckId::from_str(&check)?;
                let mut params = CheckParams::defaults_for(id);
                params.prime = prime.or(params.prime);
                if let Some(v) = det2_bound {
                    params.det2_bound = v;
                }
                if let Some(v) = t_bound {
                    params.t_bound = v;
                }
                if let Some(v) = trace_bound {
                    params.trace_bound = v;
                }
                if let Some(v) = disc_bound {
                    params.disc_bound = v;
                }
                params.n = n.or(params.n);
                if let Some(v) = enum_bound {
                    params.enum_bound = v;
                }
                (expand(id, &params), None, None)
            };

            let exec = setup_exec(cli.jobs, cfg_jobs)?;
            let cache = match cli.cache.or(cfg_cache) {
                Some(dir) => Some(Cache::new(dir)?),
                None => None,
            };
            let ctx = RunCtx { exec, cache };
            let reports = run_suite(&specs, &ctx)?;
            emit_reports(&reports, format, &mut stdout.lock())?;
            Ok(ExitCode::from(report::exit_code(&reports) as u8))
        }
    }
}

/// Configure the global worker pool. `--jobs` wins over the config file;
/// `--jobs 1` forces the sequential paths everywhere.
fn setup_exec(
    cli_jobs: Option<usize>,
    cfg_jobs: Option<usize>,
) -> Result<Exec, Box<dyn std::error::Error>> {
    let jobs = cli_jobs.or(cfg_jobs);
    match jobs {
        Some(0) => Err("--jobs must be >= 1".into()),
        Some(1) => Ok(Exec::Sequential),
        Some(j) => {
            // ignore the error if a pool was already built in this process
            let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
            Ok(Exec::Parallel)
        }
        None => Ok(Exec::Parallel),
    }
}
