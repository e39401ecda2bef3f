use std::process::ExitCode;

use clap::Parser;
use xxz_floquet_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match xxz_floquet_cli::run(cli) {
        Ok(text) => {
            if !text.is_empty() {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
