use std::process::ExitCode;

use clap::Parser;
use gradhom::cli::{run, Cli};

fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => ExitCode::from(run(&cli)),
        Err(e) => {
            // Usage errors count as config errors; help and version succeed.
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { 1 } else { 0 })
        }
    }
}
