//! Command-line scenario runner for momentumlab: runs named experiments,
//! checks their invariants, and writes JSON or CSV reports.

pub mod config;
pub mod error;
pub mod report;
pub mod scenarios;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{parse_tolerance, Format, Overrides, ScenarioConfig};
use crate::error::{usage, CliError};
use crate::report::RunReport;
pub use crate::scenarios::{list_scenarios, run_scenario};

pub const THREADS_ENV: &str = "MOMENTUMLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "momentumlab", version, about = "Momentum-set scenarios and invariant checks")]
#[command(args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the scenario catalog.
    List,
}

#[derive(Debug, Default, clap::Args)]
pub struct RunArgs {
    /// Scenario label (see `momentumlab list`).
    #[arg(long)]
    pub scenario: Option<String>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", value_parser = parse_tolerance)]
    pub tol: Vec<(String, f64)>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
}

/// Parses `MOMENTUMLAB_THREADS`.
pub fn parse_threads(value: Option<&str>) -> Result<Option<usize>, CliError> {
    let Some(v) = value else { return Ok(None) };
    match v.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Some(n)),
        _ => usage(format!("{THREADS_ENV} must be an integer >= 1, got {v:?}")),
    }
}

pub fn resolve_config(args: RunArgs) -> Result<ScenarioConfig, CliError> {
    let base = match (&args.config, &args.scenario) {
        (Some(path), _) => ScenarioConfig::from_file(path)?,
        (None, Some(s)) => ScenarioConfig::named(s),
        (None, None) => return usage("give --scenario or --config (or `momentumlab list`)"),
    };
    Ok(base.apply(Overrides {
        scenario: args.scenario,
        seed: args.seed,
        n_samples: args.samples,
        tolerances: args.tol,
        output: args.output,
        format: args.format,
    }))
}

pub fn render(report: &RunReport, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => Ok(report.to_json()?.into_bytes()),
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            Ok(buf)
        }
    }
}

fn emit(cfg: &ScenarioConfig, report: &RunReport, stdout: &mut dyn Write) -> Result<(), CliError> {
    let bytes = render(report, cfg.format())?;
    match &cfg.output {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => stdout
            .write_all(&bytes)
            .map_err(|source| CliError::Io { path: "stdout".into(), source }),
    }
}

fn execute(cli: Cli, pool: &rayon::ThreadPool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    if let Some(Command::List) = cli.command {
        for (label, desc) in list_scenarios() {
            writeln!(stdout, "{label}\t{desc}").map_err(|source| CliError::Io { path: "stdout".into(), source })?;
        }
        return Ok(0);
    }
    let cfg = resolve_config(cli.run)?;
    let report = pool.install(|| run_scenario(&cfg))?;
    emit(&cfg, &report, stdout)?;
    for line in report.failure_records() {
        let _ = writeln!(stderr, "{line}");
    }
    Ok(report.exit_code())
}

/// Full command-line behavior with injectable streams and environment.
/// Returns the process exit code.
pub fn run_cli<I, T>(args: I, threads: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    let result = parse_threads(threads).and_then(|n| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = n {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        execute(cli, &pool, stdout, stderr)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_variable() {
        assert_eq!(parse_threads(None).unwrap(), None);
        assert_eq!(parse_threads(Some("3")).unwrap(), Some(3));
        assert!(parse_threads(Some("0")).is_err());
        assert!(parse_threads(Some("many")).is_err());
    }

    #[test]
    fn missing_scenario_is_usage() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run_cli(["momentumlab"], None, &mut out, &mut err), 2);
    }
}
