//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 internal error, 2 configuration or parameter
//! error, 3 data error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{load_config, ConfigError, Proportions, SynthConfig};
use crate::dataio::{audit_csv, generate_synthetic, write_csv, DataIoError};
use crate::harness::{emit_report, run_experiment_with, HarnessError, RunOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ensemble-screen", version, about = "Cross-validated classifier-ensemble experiments on screening features")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file and write its report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Replace a config value, e.g. `cv.seed=7`. Repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Cap on worker threads.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write a synthetic feature CSV.
    Synth {
        #[arg(long, default_value_t = 1200)]
        n: usize,
        /// `reference` or four comma-separated grade proportions (R0..R3).
        #[arg(long, default_value = "reference")]
        proportions: String,
        #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
        separation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a feature CSV and print per-line diagnostics.
    Validate {
        #[arg(long)]
        data: PathBuf,
    },
}

fn harness_exit(e: &HarnessError) -> i32 {
    match e {
        HarnessError::Config(_) => EXIT_CONFIG,
        HarnessError::Data(_) | HarnessError::Metrics { .. } => EXIT_DATA,
        HarnessError::Fold { .. } | HarnessError::Io { .. } | HarnessError::Manifest { .. } | HarnessError::Threads(_) => {
            EXIT_INTERNAL
        }
    }
}

fn data_exit(e: &DataIoError) -> i32 {
    match e {
        DataIoError::BadProportions(_) | DataIoError::BadParameter(_) => EXIT_CONFIG,
        _ => EXIT_DATA,
    }
}

/// Parses `args` (program name first) and executes the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    execute(cli.command, out, err)
}

pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match command {
        Command::Run {
            config,
            overrides,
            threads,
        } => cmd_run(&config, &overrides, threads, out, err),
        Command::Synth {
            n,
            proportions,
            separation,
            seed,
            out: path,
        } => cmd_synth(n, &proportions, separation, seed, &path, out, err),
        Command::Validate { data } => cmd_validate(&data, out, err),
    }
}

pub fn cmd_run(
    config: &std::path::Path,
    overrides: &[String],
    threads: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if threads == Some(0) {
        let _ = writeln!(err, "error: --threads must be at least 1");
        return EXIT_CONFIG;
    }
    let config = match load_config(config, overrides) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = run_experiment_with(&config, RunOptions { threads })
        .and_then(|report| emit_report(&report, &config.out_dir).map(|_| ()));
    match result {
        Ok(()) => {
            let _ = writeln!(out, "{}", config.out_dir.display());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            harness_exit(&e)
        }
    }
}

pub fn cmd_synth(
    n: usize,
    proportions: &str,
    separation: f64,
    seed: u64,
    path: &std::path::Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let params = Proportions::parse(proportions)
        .map_err(|m| ConfigError::new("proportions", m))
        .and_then(|proportions| {
            SynthConfig {
                n,
                proportions,
                separation,
                seed,
            }
            .params()
        });
    let params = match params {
        Ok(p) => p,
        Err(e) => {
            let key = e.key.rsplit('.').next().unwrap_or(&e.key);
            let _ = writeln!(err, "error: --{key}: {}", e.message);
            return EXIT_CONFIG;
        }
    };
    let result = generate_synthetic(&params).and_then(|d| write_csv(&d, path));
    match result {
        Ok(()) => {
            let _ = writeln!(out, "{}", path.display());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                DataIoError::Io { .. } => EXIT_INTERNAL,
                other => data_exit(&other),
            }
        }
    }
}

pub fn cmd_validate(path: &std::path::Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match audit_csv(path) {
        Ok(diagnostics) if diagnostics.is_empty() => {
            let _ = writeln!(out, "{}: ok", path.display());
            EXIT_OK
        }
        Ok(diagnostics) => {
            for d in &diagnostics {
                let _ = writeln!(err, "{}:{}: {}", path.display(), d.line, d.message);
            }
            let _ = writeln!(err, "{} invalid row(s)", diagnostics.len());
            EXIT_DATA
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}
