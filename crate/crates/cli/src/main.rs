//! `felkit` command-line front end.

mod args;
mod config;
mod error;
mod output;
mod run;

use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = args::parse(std::env::args_os()).and_then(|inv| match inv {
        None => Ok(0),
        Some(inv) => run::run(&config::build(&inv)?),
    });
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("felkit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
