use std::process::ExitCode;

use clap::Parser;

use robofoil_gateway::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("robofoil: {e}");
            e.exit_code()
        }
    }
}
