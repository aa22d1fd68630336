//! Command-line front end: single tests on CSV data, benchmark sweeps and
//! synthetic data generation.

pub mod config;
pub mod data;
pub mod error;
pub mod run;

use std::ffi::OsString;
use std::io::Write;

pub use config::{parse_args, BenchmarkConfig, Job, NullKind, RunConfig, SingleTest};
pub use data::{load_csv, Loaded};
pub use error::{CliError, CliResult};
pub use run::{benchmark, run, BenchmarkRow, TestReport, EXIT_ERROR, EXIT_OK, EXIT_REJECT};

/// Parses `argv`, runs it and returns the exit code. Errors go to `err`.
pub fn main_with<I, A>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let outcome = parse_args(argv).and_then(|config| run(&config, out, err));
    match outcome {
        Ok(code) => code,
        Err(CliError::Clap(e)) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            EXIT_OK
        }
        Err(CliError::Clap(e)) => {
            let _ = write!(err, "{e}");
            EXIT_ERROR
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
