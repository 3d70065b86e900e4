use std::process::ExitCode;

use clap::Parser;
use notestd_cli::{init_logging, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    match run(&cli) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("notestd: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}
