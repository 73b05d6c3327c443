//! Command line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{ConfigError, Mode, RunConfig};
use crate::report::{report_json, write_csv, write_json};
use crate::suites::run_suite;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "divcorr", version, about = "Verification harness for shifted divisor correlations")]
struct Cli {
    #[command(subcommand)]
    mode: Option<Cmd>,
    /// flat key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON report path
    #[arg(long, global = true)]
    out: Option<String>,
    /// small or medium
    #[arg(long, global = true)]
    profile: Option<String>,
    /// worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// extra KEY=VALUE settings, applied after the config file
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// exact local identity checks on seeded instances
    VerifyLocal,
    /// generalized divisor function values
    Tau,
    /// correlation sum, optionally against the direct integral
    Correlate,
    /// main-term prediction from the swap recipe
    Recipe,
    /// correlation sum, direct integral and recipe side by side
    Compare,
    /// swap and star-system multiplicity counts
    Multiplicity,
}

impl From<Cmd> for Mode {
    fn from(c: Cmd) -> Mode {
        match c {
            Cmd::VerifyLocal => Mode::VerifyLocal,
            Cmd::Tau => Mode::Tau,
            Cmd::Correlate => Mode::Correlate,
            Cmd::Recipe => Mode::Recipe,
            Cmd::Compare => Mode::Compare,
            Cmd::Multiplicity => Mode::Multiplicity,
        }
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut cfg = RunConfig::parse(&text, cli.mode.map(Mode::from))?;
    if let Some(m) = cli.mode {
        cfg.mode = m.into();
    }
    for s in &cli.sets {
        let (k, v) = s.split_once('=').ok_or_else(|| ConfigError(format!("--set expects KEY=VALUE, got '{s}'")))?;
        cfg.set(k.trim(), v)?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(p) = &cli.profile {
        cfg.profile = p.parse()?;
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Run a parsed configuration, print the table, write reports; returns the exit status.
pub fn execute<W: Write>(cfg: &RunConfig, stdout: &mut W) -> Result<i32, ConfigError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| ConfigError(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| run_suite(cfg))?;
    let io = |e: std::io::Error| ConfigError(format!("writing output: {e}"));
    for c in &outcome.checks {
        writeln!(stdout, "{}", c.table_row()).map_err(io)?;
    }
    let passed = outcome.checks.iter().filter(|c| c.passed).count();
    writeln!(stdout, "{} {}/{} checks passed", cfg.mode.name(), passed, outcome.checks.len()).map_err(io)?;
    if let Some(path) = &cfg.out {
        let doc = report_json(cfg.mode.name(), &cfg.settings(), &outcome.checks);
        let f = File::create(path).map_err(|e| ConfigError(format!("{path}: {e}")))?;
        write_json(BufWriter::new(f), &doc).map_err(io)?;
    }
    if let Some(path) = &cfg.csv {
        let f = File::create(path).map_err(|e| ConfigError(format!("{path}: {e}")))?;
        write_csv(BufWriter::new(f), &outcome.moments).map_err(|e| ConfigError(format!("{path}: {e}")))?;
    }
    // an empty run has nothing to vouch for
    Ok(if !outcome.checks.is_empty() && passed == outcome.checks.len() { EXIT_PASS } else { EXIT_CHECK_FAILURE })
}

/// Entry point shared by the binary and the tests.
pub fn main_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let result = build_config(&cli).and_then(|cfg| execute(&cfg, &mut std::io::stdout().lock()));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            EXIT_CONFIG
        }
    }
}
