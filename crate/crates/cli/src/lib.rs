//! Text syntax, file formats and the `lineint` command line.

pub mod command;
pub mod error;
pub mod files;
pub mod render;
pub mod syntax;

use clap::error::ErrorKind;
use clap::Parser;

use command::{execute, Cli, Format, ProcessStdin, Stdin};
pub use error::{CliError, CliResult};

/// What a run prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs with the process's standard input behind `-`.
pub fn run_args<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with_stdin(args, &mut ProcessStdin)
}

/// Runs with `stdin` behind `-`. The first argument is the program name.
pub fn run_with_stdin<I, S>(args: I, stdin: &mut dyn Stdin) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Outcome {
                exit_code: 0,
                stdout: e.to_string(),
                stderr: String::new(),
            }
        }
        Err(e) => {
            let message = e.to_string();
            let summary: Vec<&str> = message
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .map(|l| l.trim_start_matches("error: "))
                .collect();
            return failure(&CliError::Usage(summary.join(" ")));
        }
    };
    match execute(&cli, stdin) {
        Ok(r) => {
            let stdout = match cli.options.format {
                Format::Text => r.text,
                Format::Json => serde_json::to_string_pretty(&r.json).expect("values serialize"),
            };
            Outcome {
                exit_code: 0,
                stdout: stdout + "\n",
                stderr: String::new(),
            }
        }
        Err(e) => failure(&e),
    }
}

fn failure(e: &CliError) -> Outcome {
    Outcome {
        exit_code: e.exit_code(),
        stdout: serde_json::to_string(&e.to_json()).expect("values serialize") + "\n",
        stderr: format!("error: {e}\n"),
    }
}
