//! Command-line front end.
//!
//! ```text
//! acsav <run|converge|compare|coarsen|selftest> --config FILE [--out DIR]
//!       [--set key=value]... [--seed N]
//! ```
//!
//! Exit codes: 0 success, 1 numerical divergence of a run (outputs are still
//! written) or a runtime failure such as I/O, 2 usage or configuration error.
//!
//! `run` and `coarsen` print one summary line:
//!
//! ```text
//! scheme=sesav1 steps=1 time=0.1 final_energy=.. modified_energy=.. sup_norm=.. max_sup_norm=.. mbp=OK steady=none diverged=none
//! ```

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::harness::{
    apply_overrides, coarsening_study, comparison_study, convergence_study_schemes, io,
    run_simulation, KappaSpec, RunConfig, RunOutput,
};
use crate::schemes::SchemeId;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIVERGED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubcommandKind {
    Run,
    Converge,
    Compare,
    Coarsen,
    Selftest,
}

/// A parsed invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub subcommand: SubcommandKind,
    pub config: Option<PathBuf>,
    /// `--set` pairs in command-line order, then `--seed`.
    pub overrides: Vec<(String, String)>,
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum UsageError {
    /// Help or version output; not an error.
    Info(String),
    Invalid(String),
}

#[derive(Parser, Debug)]
#[command(name = "acsav", version, about = "Allen-Cahn SAV-family integrators")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Single simulation; writes a CSV time series.
    Run(CommonArgs),
    /// Temporal convergence study against a fine-step sESAV2 benchmark.
    Converge(CommonArgs),
    /// Runs several schemes and stabilizers on the same data.
    Compare(CommonArgs),
    /// Long run until the energy settles.
    Coarsen(CommonArgs),
    /// Built-in invariant checks.
    Selftest(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_key_value)]
    set: Vec<(String, String)>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_key_value(s: &str) -> std::result::Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(format!("expected KEY=VALUE, got `{s}`")),
    }
}

pub fn parse_args<I, T>(argv: I) -> std::result::Result<Command, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            UsageError::Info(e.to_string())
        }
        _ => UsageError::Invalid(e.to_string()),
    })?;
    let (subcommand, args) = match cli.command {
        Sub::Run(a) => (SubcommandKind::Run, a),
        Sub::Converge(a) => (SubcommandKind::Converge, a),
        Sub::Compare(a) => (SubcommandKind::Compare, a),
        Sub::Coarsen(a) => (SubcommandKind::Coarsen, a),
        Sub::Selftest(a) => (SubcommandKind::Selftest, a),
    };
    if subcommand != SubcommandKind::Selftest && args.config.is_none() {
        return Err(UsageError::Invalid(
            "error: --config <PATH> is required for this subcommand".into(),
        ));
    }
    let mut overrides = args.set;
    if let Some(seed) = args.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    Ok(Command {
        subcommand,
        config: args.config,
        overrides,
        out: args.out,
    })
}

pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(cmd) => execute(&cmd),
        Err(UsageError::Info(msg)) => {
            print!("{msg}");
            EXIT_OK
        }
        Err(UsageError::Invalid(msg)) => {
            eprintln!("{}", msg.trim_end());
            EXIT_USAGE
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConvergeSection {
    taus: Vec<f64>,
    benchmark_tau: f64,
    schemes: Option<Vec<SchemeId>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareSection {
    schemes: Option<Vec<SchemeId>>,
    kappas: Option<Vec<KappaSpec>>,
}

/// Config file contents: the run table plus optional study sections.
struct LoadedConfig {
    run: RunConfig,
    converge: Option<toml::Table>,
    compare: Option<toml::Table>,
}

fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(format!("{}: {e}", path.display())))?;
    apply_overrides(&mut table, overrides)?;
    let mut section = |name: &str| -> Result<Option<toml::Table>> {
        match table.remove(name) {
            None => Ok(None),
            Some(toml::Value::Table(t)) => Ok(Some(t)),
            Some(_) => Err(Error::Config(format!("`{name}` must be a table"))),
        }
    };
    let converge = section("converge")?;
    let compare = section("compare")?;
    Ok(LoadedConfig {
        run: RunConfig::from_table(table)?,
        converge,
        compare,
    })
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidArgument(_)
        | Error::InvalidGrid(_)
        | Error::NoBracket(_) => EXIT_USAGE,
        _ => EXIT_DIVERGED,
    }
}

pub fn execute(cmd: &Command) -> i32 {
    let result = match cmd.subcommand {
        SubcommandKind::Selftest => Ok(selftest()),
        _ => {
            let path = cmd.config.as_deref().expect("checked by parse_args");
            let loaded = match load_config(path, &cmd.overrides) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            };
            match cmd.subcommand {
                SubcommandKind::Run => cmd_run(loaded, &cmd.out),
                SubcommandKind::Converge => cmd_converge(loaded, &cmd.out),
                SubcommandKind::Compare => cmd_compare(loaded, &cmd.out),
                SubcommandKind::Coarsen => cmd_coarsen(loaded, &cmd.out),
                SubcommandKind::Selftest => unreachable!(),
            }
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn opt_time(t: Option<f64>) -> String {
    t.map_or_else(|| "none".to_string(), |t| t.to_string())
}

/// The stable one-line run summary.
pub fn summary_line(out: &RunOutput) -> String {
    let last = out.last_row();
    format!(
        "scheme={} steps={} time={} final_energy={} modified_energy={} sup_norm={} max_sup_norm={} mbp={} steady={} diverged={}",
        out.params.scheme,
        last.step,
        last.time,
        last.original_energy,
        last.modified_energy,
        last.sup_norm,
        out.summary.max_sup_norm,
        if out.mbp_violated() { "VIOLATED" } else { "OK" },
        opt_time(out.summary.steady_state_time),
        out.summary
            .diverged_at
            .map_or_else(|| "none".to_string(), |s| s.to_string()),
    )
}

fn run_with_outputs(mut cfg: RunConfig, out_dir: &Path, default_csv: &str) -> Result<RunOutput> {
    if cfg.output.csv.is_none() {
        cfg.output.csv = Some(PathBuf::from(default_csv));
    }
    cfg.output = cfg.output.rebased(out_dir);
    let out = run_simulation(&cfg)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    Ok(out)
}

fn cmd_run(loaded: LoadedConfig, out_dir: &Path) -> Result<i32> {
    let out = run_with_outputs(loaded.run, out_dir, "run.csv")?;
    println!("{}", summary_line(&out));
    Ok(if out.diverged() { EXIT_DIVERGED } else { EXIT_OK })
}

fn cmd_coarsen(loaded: LoadedConfig, out_dir: &Path) -> Result<i32> {
    let mut cfg = loaded.run;
    if cfg.output.csv.is_none() {
        cfg.output.csv = Some(PathBuf::from("coarsen.csv"));
    }
    if cfg.output.snapshot_dir.is_none() {
        cfg.output.snapshot_dir = Some(PathBuf::from("."));
    }
    cfg.output = cfg.output.rebased(out_dir);
    let res = coarsening_study(&cfg)?;
    for w in &res.output.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "{} constant_state={} reached_bound={}",
        summary_line(&res.output),
        res.constant_state
            .map_or_else(|| "none".to_string(), |c| c.to_string()),
        res.reached_bound
    );
    Ok(if res.output.diverged() { EXIT_DIVERGED } else { EXIT_OK })
}

fn cmd_converge(loaded: LoadedConfig, out_dir: &Path) -> Result<i32> {
    let section: ConvergeSection = loaded
        .converge
        .ok_or_else(|| Error::Config("converge needs a [converge] section".into()))?
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(format!("[converge]: {e}")))?;
    let schemes = section.schemes.unwrap_or_else(|| vec![loaded.run.scheme]);
    let results =
        convergence_study_schemes(&loaded.run, &schemes, &section.taus, section.benchmark_tau)?;
    let mut lines = Vec::new();
    for (scheme, records) in &results {
        for r in records {
            let order = r.observed_order.map(io::fmt_float).unwrap_or_default();
            lines.push(format!(
                "{scheme},{},{},{order}",
                io::fmt_float(r.tau),
                io::fmt_float(r.l2_error)
            ));
            println!(
                "scheme={scheme} tau={} l2_error={:.6e} order={}",
                r.tau,
                r.l2_error,
                r.observed_order
                    .map_or_else(|| "-".to_string(), |o| format!("{o:.4}"))
            );
        }
    }
    io::write_table(
        &out_dir.join("convergence.csv"),
        "scheme,tau,l2_error,observed_order",
        &lines,
    )?;
    Ok(EXIT_OK)
}

fn cmd_compare(loaded: LoadedConfig, out_dir: &Path) -> Result<i32> {
    let section: CompareSection = match loaded.compare {
        Some(t) => t
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("[compare]: {e}")))?,
        None => CompareSection::default(),
    };
    let schemes = section.schemes.unwrap_or_else(|| SchemeId::ALL.to_vec());
    let kappas = section.kappas.unwrap_or_else(|| vec![loaded.run.kappa]);
    let rows = comparison_study(&loaded.run, &schemes, &kappas, Some(out_dir))?;
    let mut lines = Vec::new();
    for row in &rows {
        let mbp = if row.mbp_violated() { "VIOLATED" } else { "OK" };
        println!(
            "scheme={} kappa={} max_sup_norm={} mbp={mbp} energy_violations={} diverged={}",
            row.scheme,
            row.kappa,
            row.max_sup_norm(),
            row.energy_violations(),
            row.diverged()
        );
        lines.push(format!(
            "{},{},{},{},{},{}",
            row.scheme,
            io::fmt_float(row.kappa),
            io::fmt_float(row.max_sup_norm()),
            row.mbp_violated(),
            row.energy_violations(),
            row.diverged()
        ));
    }
    io::write_table(
        &out_dir.join("compare_summary.csv"),
        "scheme,kappa,max_sup_norm,mbp_violated,energy_violations,diverged",
        &lines,
    )?;
    Ok(EXIT_OK)
}

/// Runs the built-in checks and prints one line per check.
pub fn selftest() -> i32 {
    let checks = crate::selftest::run_all();
    let mut ok = true;
    for (name, result) in &checks {
        match result {
            Ok(()) => println!("PASS {name}"),
            Err(msg) => {
                ok = false;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    if ok {
        EXIT_OK
    } else {
        EXIT_DIVERGED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_converge_with_override() {
        let cmd = parse_args([
            "acsav", "converge", "--config", "conv.toml", "--set", "scheme=sesav2",
        ])
        .unwrap();
        assert_eq!(cmd.subcommand, SubcommandKind::Converge);
        assert_eq!(cmd.config, Some(PathBuf::from("conv.toml")));
        assert_eq!(cmd.overrides, vec![("scheme".into(), "sesav2".into())]);
        assert_eq!(cmd.out, PathBuf::from("."));
    }

    #[test]
    fn seed_shorthand_comes_last() {
        let cmd = parse_args([
            "acsav", "run", "--config", "a.toml", "--seed", "7", "--set", "seed=3", "--set",
            "tau=0.5",
        ])
        .unwrap();
        assert_eq!(
            cmd.overrides,
            vec![
                ("seed".into(), "3".into()),
                ("tau".into(), "0.5".into()),
                ("seed".into(), "7".into())
            ]
        );
    }

    #[test]
    fn missing_config_is_usage_error() {
        assert!(matches!(parse_args(["acsav", "run"]), Err(UsageError::Invalid(_))));
        assert_eq!(main_with_args(["acsav", "run"]), EXIT_USAGE);
        assert!(parse_args(["acsav", "selftest"]).is_ok());
    }

    #[test]
    fn malformed_inputs_are_usage_errors() {
        assert_eq!(
            main_with_args(["acsav", "run", "--config", "x.toml", "--set", "novalue"]),
            EXIT_USAGE
        );
        assert_eq!(main_with_args(["acsav", "run", "--bogus"]), EXIT_USAGE);
        assert_eq!(main_with_args(["acsav", "frobnicate"]), EXIT_USAGE);
        assert_eq!(
            main_with_args(["acsav", "run", "--config", "/nonexistent/cfg.toml"]),
            EXIT_USAGE
        );
    }
}
