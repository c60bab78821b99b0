use std::process::ExitCode;

use clap::Parser;

use glparab_cli::cli::Cli;
use glparab_cli::{init_threads, run};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| cli.command.into_config()).and_then(|cfg| run::execute(&cfg));
    match result {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
