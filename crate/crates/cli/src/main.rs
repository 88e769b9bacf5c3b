use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use emorec_cli::args::{Cli, Command};
use emorec_cli::{commands, exit};

fn run(cli: &Cli) -> anyhow::Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let g = &cli.global;
    match &cli.command {
        Command::Train(a) => commands::train(g, a, &mut out)?,
        Command::Predict(a) => commands::predict(g, a, &mut out)?,
        Command::Evaluate(a) => commands::evaluate(g, a, &mut out)?,
        Command::Report(a) => commands::report(g, a, &mut out)?,
        Command::Serve(a) => commands::serve(g, a)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code_for(&e))
        }
    }
}
