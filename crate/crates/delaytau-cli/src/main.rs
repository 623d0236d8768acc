//! Command-line front end for the delaytau library.
//!
//! Subcommands parse a JSON system description, dispatch the requested
//! computation, and emit deterministic CSV or JSON artifacts. Exit
//! codes: 0 on success, 2 for configuration mistakes, 3 for numerical
//! failures; failures also print a machine-parseable JSON object on
//! stderr with a stable `kind` tag and the human-readable message.

mod args;
mod cmds;
mod error;
mod out;

use clap::Parser;

use crate::args::{Cli, Cmd};
use crate::error::CliError;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        let payload = serde_json::json!({
            "error": {"kind": e.kind(), "message": e.to_string()}
        });
        eprintln!("{payload}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (artifact, dest) = match cli.cmd {
        Cmd::Discretize(a) => (cmds::discretize(&a)?, a.out),
        Cmd::Converge(a) => (cmds::converge(&a)?, a.out),
        Cmd::Roots(a) => (cmds::roots(&a)?, a.out),
        Cmd::Tfscan(a) => (cmds::tfscan(&a)?, a.out),
        Cmd::PadeCheck(a) => (cmds::pade_check(&a)?, a.out),
    };
    out::write_artifact(&artifact, dest.as_deref())
}
