use std::process::ExitCode;

use clap::Parser;
use hamlearn::cli::{self, Cli};
use hamlearn::harness::configure_threads;

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
