//! Scenario runner for the hyperlab verification suites.

pub mod config;
pub mod report;
pub mod suites;

use std::fmt;
use std::io::Write;

pub use config::{Caps, CheckArgs, Cli, Command, MetricChoice, ScenarioConfig, Suite};
pub use report::{emit, Check, Field, Fields, Format, SuiteReport, Witness, CSV_HEADER, SCHEMA_VERSION};
pub use suites::run_scenario;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config values.
    Usage(String),
    /// A resource cap would be exceeded.
    Cap(String),
    Core(hyperlab_core::Error),
    Io(String),
}

impl CliError {
    /// 1 for failed mathematical checks, 2 for bad input, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        use hyperlab_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Cap(_) => 2,
            CliError::Io(_) => 3,
            CliError::Core(E::Input(_) | E::Resource(_) | E::Unsupported(_)) => 2,
            CliError::Core(E::Numeric(_) | E::InvariantViolation(_)) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Cap(m) => write!(f, "resource cap: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hyperlab_core::Error> for CliError {
    fn from(e: hyperlab_core::Error) -> Self {
        CliError::Core(e)
    }
}

/// Resolve, run, write the report; returns the process exit code.
pub fn run(args: CheckArgs) -> i32 {
    match run_inner(args) {
        Ok(passed) => {
            if passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("hyperlab: {e}");
            e.exit_code()
        }
    }
}

fn run_inner(args: CheckArgs) -> Result<bool, CliError> {
    let cfg = ScenarioConfig::resolve(args)?;
    let report = run_scenario(&cfg)?;
    let bytes = emit(&report, cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("cannot write report: {e}")))?;
        }
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("hyperlab: check {}/{} failed", c.suite, c.name);
    }
    Ok(report.passed)
}
