//! `travelwave`: command-line runs over the solitary-wave library.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure (including a
//! verification that ran but did not pass). Errors are reported on stderr as
//! one line of JSON, `{"error": {"kind": ..., "message": ...}}`.

mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::Cli;
use crate::error::error_json;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            eprintln!("{}", error_json("validation", message.trim().to_owned()));
            return ExitCode::from(1);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), e.to_string()));
            ExitCode::from(e.exit_code())
        }
    }
}
