//! `nkcheck`: run identity suites on a model and emit JSON-lines reports.
//!
//! Exit status: 0 when every check has its declared outcome, 1 when any
//! does not, 2 on configuration or I/O errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nkgeom::report::{emit_jsonl, histogram, CheckReport};
use nkgeom::suite::{default_tolerance, negative_control, run, write_reports, RunConfig};
use nkgeom::{DerivativeMode, GeomError};

/// Environment variable naming the default output directory.
const OUT_DIR_VAR: &str = "NKCHECK_OUT_DIR";

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DerivMode {
    Exact,
    Differences,
}

#[derive(Debug, Parser)]
#[command(name = "nkcheck", version, about = "Pointwise verification of nearly Kähler identities")]
#[command(after_help = "Per-check tolerances: --tol.<check-id> <value> (or --tol.<check-id>=<value>).\n\
Without --out, reports go to $NKCHECK_OUT_DIR/<model>-<seed>.jsonl if that variable is set, else to stdout.")]
struct Cli {
    /// Model: s3s3, s6, s2s2 or ansatz.
    #[arg(long, default_value = "s3s3")]
    model: String,
    /// Suites (comma separated or repeated): gray, nk-core, reduction, lie, base, canonical, ansatz, all.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    suite: Vec<String>,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value = "exact")]
    deriv_mode: DerivMode,
    /// Output file for JSON-lines reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// List the check ids of the selected suites with their tolerances and exit.
    #[arg(long)]
    list_checks: bool,
}

/// Splits `--tol.<id> v` and `--tol.<id>=v` out of the argument list.
fn extract_tolerances(args: Vec<String>) -> Result<(Vec<String>, BTreeMap<String, f64>), String> {
    let mut rest = Vec::new();
    let mut tols = BTreeMap::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(spec) = a.strip_prefix("--tol.") else {
            rest.push(a);
            continue;
        };
        let (id, val) = match spec.split_once('=') {
            Some((id, v)) => (id.to_string(), v.to_string()),
            None => (spec.to_string(), it.next().ok_or_else(|| format!("missing value for --tol.{spec}"))?),
        };
        if id.is_empty() {
            return Err("empty check id in --tol.".into());
        }
        let v: f64 = val.parse().map_err(|_| format!("invalid tolerance `{val}` for {id}"))?;
        tols.insert(id, v);
    }
    Ok((rest, tols))
}

fn config_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("nkcheck: {e}");
    ExitCode::from(2)
}

fn list_checks(config: &RunConfig) -> Result<(), GeomError> {
    let probe = RunConfig { samples: 2, ..config.clone() };
    let kind = config.model.parse()?;
    for r in run(&probe)? {
        let tol = config.tolerances.get(&r.id).copied().or(negative_control(kind, &r.id));
        let marker = if r.expected_fail { "  (expected fail)" } else { "" };
        println!("{:32} {:.0e}{marker}", r.id, tol.unwrap_or_else(|| default_tolerance(&r.id)));
    }
    Ok(())
}

fn summary(reports: &[CheckReport]) -> String {
    let bad: Vec<&CheckReport> = reports.iter().filter(|r| !r.ok()).collect();
    let mut s = format!("{} checks, {} with unexpected outcome\nlog10(max residual):\n", reports.len(), bad.len());
    s.push_str(&histogram(reports));
    for r in bad {
        let what = if r.expected_fail { "expected to fail but passed" } else { "FAILED" };
        s.push_str(&format!(
            "  {} {what}: max residual {:.3e} > tolerance {:.0e}\n",
            r.id, r.max_residual, r.tolerance
        ));
    }
    s
}

fn main() -> ExitCode {
    let (args, tolerances) = match extract_tolerances(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => return config_error(e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let config = RunConfig {
        model: cli.model,
        suites: cli.suite,
        samples: cli.samples,
        seed: cli.seed,
        deriv_mode: match cli.deriv_mode {
            DerivMode::Exact => DerivativeMode::ExactPropagation,
            DerivMode::Differences => DerivativeMode::ExtrapolatedDifferences,
        },
        tolerances,
        out: cli.out,
    };
    if cli.list_checks {
        return match list_checks(&config) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => config_error(e),
        };
    }
    let reports = match run(&config) {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    let out = config.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_VAR).map(|d| PathBuf::from(d).join(format!("{}-{}.jsonl", config.model, config.seed)))
    });
    let written = match &out {
        Some(path) => write_reports(&reports, path),
        None => emit_jsonl(&reports, std::io::stdout().lock()),
    };
    if let Err(e) = written {
        return config_error(e);
    }
    eprint!("{}", summary(&reports));
    if reports.iter().all(CheckReport::ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
