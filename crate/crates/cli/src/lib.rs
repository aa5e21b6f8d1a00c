//! The `xfid` command line. [`run`] takes argv and the two output streams and
//! returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | a verification run or the reference examples found a mismatch |
//! | 2 | bad flags, bad values, unreadable or unwritable files |
//! | 3 | well-formed target that no valid state realizes |

mod args;
mod commands;
pub mod config;

use std::fs;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

pub use args::{Cli, Command, OutputArgs, StateArgs, SweepArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] xfid_core::Error),
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_infeasible() => EXIT_INFEASIBLE,
            CliError::Core(_) => EXIT_USAGE,
            CliError::CheckFailed(_) => EXIT_CHECK_FAILED,
        }
    }
}

/// Primary output of a command, already rendered.
pub(crate) struct Rendered {
    pub text: String,
    /// Exit with [`EXIT_CHECK_FAILED`] after writing the output.
    pub failed: Option<String>,
}

impl Rendered {
    pub fn ok(text: String) -> Self {
        Self { text, failed: None }
    }
}

fn write_primary(output: &OutputArgs, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Usage(format!("cannot write output: {e}"))),
    }
}

fn output_of(command: &Command) -> &OutputArgs {
    match command {
        Command::Analyze { output, .. }
        | Command::Classify { output, .. }
        | Command::Solve { output, .. }
        | Command::Verify { output, .. }
        | Command::Examples { output } => output,
        Command::Sweep(s) => &s.output,
    }
}

fn execute(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let argv = config::expand(argv)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return Ok(());
        }
        Err(e) => {
            let text = e.render().to_string();
            return Err(CliError::Usage(text.trim_start_matches("error: ").trim_end().to_string()));
        }
    };
    let mut notes = Vec::new();
    let rendered = commands::dispatch(&cli.command, &mut notes);
    for note in notes {
        let _ = writeln!(err, "note: {note}");
    }
    let rendered = rendered?;
    write_primary(output_of(&cli.command), &rendered.text, out)?;
    match rendered.failed {
        Some(why) => Err(CliError::CheckFailed(why)),
        None => Ok(()),
    }
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(argv, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
