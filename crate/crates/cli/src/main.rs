use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hadamard_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.command.common().format;
    match run(&cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(outcome.render(format).as_bytes());
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
