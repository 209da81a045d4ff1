//! `mubcert`: generate MUB pairs, simulate the interferometer, certify counts.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid arguments, 3 invalid
//! configuration, 4 malformed or out-of-range data.

mod args;
mod commands;
mod error;
mod manifest;

use clap::Parser;

use crate::args::Cli;
use crate::commands::Invocation;

pub(crate) fn parse(argv: &[String]) -> Result<Cli, clap::Error> {
    Cli::try_parse_from(argv)
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match parse(&argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let inv = Invocation {
        argv,
        started_at: manifest::now(),
        config_override: None,
    };
    if let Err(e) = commands::run(cli, inv) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
