use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use typexp::{run, threads_from_env, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let result = threads_from_env().and_then(|threads| run(&cli, threads, &mut stdout.lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> ExitCode {
    let _ = writeln!(std::io::stderr(), "typexp: {e}");
    ExitCode::from(e.exit_code())
}
