//! Config-driven experiment runner.
//!
//! ```text
//! zenograph <command> --config <path> [--out <dir>] [--seed <u64>]
//! ```
//!
//! Every command writes `<command>.csv` and `summary.json` into the output
//! directory. Exit status: 0 success, 2 invalid config, 3 numerical tolerance
//! failure, 1 I/O trouble. `MONO_TOL` overrides the default tolerance of the
//! command's acceptance check.

pub mod config;
mod commands;
mod profile;
mod selftest;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde_json::{Map, Value};

pub use config::Config;
pub use selftest::{selftest, PropertyOutcome, SelftestReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;

/// Name of the tolerance override variable.
pub const TOL_ENV: &str = "MONO_TOL";
/// Set to any value to make `selftest` inject a failing tolerance check.
pub const FAULT_ENV: &str = "MONO_SELFTEST_FAULT";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Tolerance(_) => EXIT_TOLERANCE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Tolerance(m) => CliError::Tolerance(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Spectral,
    Measure,
    Evolve,
    Monitor,
    Zeno,
    Couple,
    Stable,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectral => "spectral",
            Command::Measure => "measure",
            Command::Evolve => "evolve",
            Command::Monitor => "monitor",
            Command::Zeno => "zeno",
            Command::Couple => "couple",
            Command::Stable => "stable",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "zenograph", version, about = "Spectral functions, graph dynamics and monitoring experiments")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Experiment config (flat `key = value` under `[section]` headers).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the config's RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// A CSV table with `#` metadata lines.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { meta: vec![], header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn push<I, T>(&mut self, row: I)
    where
        I: IntoIterator<Item = T>,
        T: ToString,
    {
        self.rows.push(row.into_iter().map(|v| v.to_string()).collect());
    }

    /// Parses a plain CSV body (header line first).
    pub fn from_csv(csv: &str) -> Self {
        let mut lines = csv.lines();
        let header = lines.next().map(|h| h.split(',').map(String::from).collect()).unwrap_or_default();
        let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
        Self { meta: vec![], header, rows }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    pub summary: Map<String, Value>,
    /// Failed acceptance check, if any.
    pub failure: Option<String>,
}

/// `MONO_TOL` if set, else `default`.
pub fn tolerance(default: f64) -> Result<f64, CliError> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(default),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::Config(format!("{TOL_ENV}: expected a positive number, found `{v}`"))),
        },
    }
}

fn write_outputs(out: &Path, command: Command, outcome: &Outcome) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let csv = out.join(format!("{}.csv", command.name()));
    std::fs::write(&csv, outcome.table.render()).map_err(|e| CliError::Io(format!("{}: {e}", csv.display())))?;
    let json = out.join("summary.json");
    let mut text = serde_json::to_string_pretty(&Value::Object(outcome.summary.clone()))
        .map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(&json, text).map_err(|e| CliError::Io(format!("{}: {e}", json.display())))?;
    Ok(())
}

/// Runs a config command and writes its artifacts.
pub fn run(command: Command, config: &Config, out: &Path, seed: Option<u64>) -> Result<Outcome, CliError> {
    let mut outcome = commands::dispatch(command, config, seed)?;
    outcome.summary.insert("command".into(), Value::from(command.name()));
    outcome.summary.insert("passed".into(), Value::from(outcome.failure.is_none()));
    write_outputs(out, command, &outcome)?;
    if let Some(msg) = &outcome.failure {
        return Err(CliError::Tolerance(msg.clone()));
    }
    Ok(outcome)
}

/// Parses arguments, runs, prints diagnostics, returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    if args.command == Command::Selftest {
        let report = selftest();
        print!("{}", report.render());
        return if report.all_passed() { EXIT_OK } else { EXIT_TOLERANCE };
    }
    let Some(path) = args.config.as_deref() else {
        eprintln!("error: --config is required for `{}`", args.command.name());
        return EXIT_CONFIG;
    };
    let result = Config::load(path).and_then(|cfg| run(args.command, &cfg, &args.out, args.seed));
    match result {
        Ok(o) => {
            println!("{}: ok ({} rows written to {})", args.command.name(), o.table.rows.len(), args.out.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
