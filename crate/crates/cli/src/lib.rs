//! Batch front-end for the CHSH rigidity lab.
//!
//! Exit codes: 0 pass, 1 usage or validation error, 2 degenerate junk or an
//! unsatisfied bound.

pub mod commands;
pub mod config;
pub mod strategy_file;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use commands::Outcome;
pub use config::{Cli, RunConfig};

pub const EXIT_USAGE: i32 = 1;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let shown = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let target: &mut dyn Write = if shown { out } else { err };
            let _ = write!(target, "{}", e.render());
            return if shown { 0 } else { EXIT_USAGE };
        }
    };
    let result = RunConfig::resolve(cli).and_then(|cfg| commands::dispatch(&cfg, out));
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}
