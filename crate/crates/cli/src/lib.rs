//! Command-line front end for the `monopole` solver.
//!
//! Exit codes: 0 on success, 1 when the numerics fail (or a check misses its
//! threshold), 2 for usage and validation errors. Errors are reported on
//! stderr as `{"error", "detail", "context"}` JSON.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

use args::{Cli, Command};
use error::{CliError, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

fn dispatch(command: &Command) -> Result<(String, Option<String>, bool), CliError> {
    Ok(match command {
        Command::Solve(a) => (commands::solve(a)?, None, true),
        Command::Profile(a) => (commands::profile(a)?, None, true),
        Command::Stability(a) => (commands::stability(a)?, None, true),
        Command::Table(a) => {
            let (out, check) = commands::table(a)?;
            match check {
                Some((report, pass)) => (out, Some(report), pass),
                None => (out, None, true),
            }
        }
        Command::Verify(a) => {
            let (out, pass) = commands::verify(a)?;
            (out, None, pass)
        }
    })
}

fn report_error(err: &CliError) {
    let text = serde_json::to_string(&err.to_json()).expect("error serializes");
    let _ = writeln!(std::io::stderr(), "{text}");
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            report_error(&CliError::Usage(
                e.render().to_string().trim_end().to_string(),
            ));
            return EXIT_USAGE;
        }
    };
    match dispatch(&cli.command) {
        Ok((out, note, pass)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return EXIT_USAGE;
            }
            if let Some(note) = note {
                let _ = std::io::stderr().write_all(note.as_bytes());
            }
            if pass {
                EXIT_OK
            } else {
                EXIT_NUMERICAL
            }
        }
        Err(e) => {
            report_error(&e);
            e.exit_code()
        }
    }
}
