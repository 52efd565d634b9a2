//! The `sturmkit` command-line front end.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 bad input,
//! 3 internal inconsistency (determinant and shooting disagree, or an
//! iteration failed to converge), 4 I/O failure.

pub mod config;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::{self, IsTerminal, Write};
use std::time::Instant;

use clap::{Parser, Subcommand};

use self::config::{resolve, Overrides, RunConfig};
use self::report::{Payload, Report};
use self::suites::{Outcome, SuiteError};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sturmkit", version, about = "Spectral checks for the Dirichlet deformation operator")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Critical velocity, deformation anchors and the top analytic eigenvalue (default)
    Info,
    /// Symmetry residuals over the Dirichlet and boundary corpora
    Symmetry,
    /// Deficiency indices over the lambda grid, with sweep and shooting study
    Deficiency,
    /// Top eigenpairs of the discretised operator against the analytic spectrum
    Spectrum,
    /// Observed order of the top eigenvalue over N/8, N/4, N/2, N
    Convergence,
    /// Every suite above plus bisection exactness; exits 0 only if all pass
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Info => "info",
            Command::Symmetry => "symmetry",
            Command::Deficiency => "deficiency",
            Command::Spectrum => "spectrum",
            Command::Convergence => "convergence",
            Command::Verify => "verify",
        }
    }
}

fn use_color() -> bool {
    std::env::var_os("STURMKIT_NO_COLOR").is_none() && io::stderr().is_terminal()
}

fn paint(text: &str, code: &str, color: bool) -> String {
    if color {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn suite_exit(e: &SuiteError) -> i32 {
    match e {
        SuiteError::Config(_) => EXIT_BAD_INPUT,
        SuiteError::Numeric(Error::InvalidParameter { .. } | Error::IndexOutOfRange { .. }) => EXIT_BAD_INPUT,
        SuiteError::Numeric(_) => EXIT_INCONSISTENT,
    }
}

fn finish<P: Payload>(command: &'static str, config: &RunConfig, outcome: Outcome<P>, started: Instant) -> i32 {
    let color = use_color();
    let (payload, checks) = match outcome {
        Ok(x) => x,
        Err(e) => {
            eprintln!("sturmkit {command}: {}", paint(&e.to_string(), "31", color));
            return suite_exit(&e);
        }
    };
    let report = Report::new(command, config, payload, checks);
    let bytes = match report.render(config.output_format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("sturmkit {command}: cannot encode report: {e}");
            return EXIT_IO;
        }
    };
    let written = match &config.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(&bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| format!("cannot write standard output: {e}"))
        }
    };
    if let Err(message) = written {
        eprintln!("sturmkit {command}: {message}");
        return EXIT_IO;
    }

    for c in report.failed_checks() {
        eprintln!("  {} {} = {:e}", paint("FAIL", "31", color), c.name, c.value);
    }
    let total = report.checks.len();
    let failed = report.failed_checks().count();
    let verdict = if report.passed {
        paint("PASS", "32", color)
    } else {
        paint("FAIL", "31", color)
    };
    eprintln!(
        "sturmkit {command}: {verdict} ({}/{total} checks, {:.2} s)",
        total - failed,
        started.elapsed().as_secs_f64()
    );
    if report.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let config = match resolve(&cli.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("sturmkit: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    let started = Instant::now();
    let command = cli.command.unwrap_or(Command::Info);
    let name = command.name();
    match command {
        Command::Info => finish(name, &config, suites::info(&config), started),
        Command::Symmetry => finish(name, &config, suites::symmetry(&config), started),
        Command::Deficiency => finish(name, &config, suites::deficiency(&config), started),
        Command::Spectrum => finish(name, &config, suites::spectrum(&config), started),
        Command::Convergence => finish(name, &config, suites::convergence(&config), started),
        Command::Verify => finish(name, &config, suites::verify(&config), started),
    }
}
