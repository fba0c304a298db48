mod args;
mod commands;
mod error;
mod input;
mod report;

use args::{ChannelAction, Cli, Command};
use clap::Parser;
use error::CliError;
use std::process::ExitCode;
use std::time::Instant;

fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    match &cli.command {
        Command::Entropy(a) => commands::entropy(a),
        Command::Bound(a) => commands::bound(a),
        Command::Region(a) => commands::region(a),
        Command::Decouple(a) => commands::decouple(a),
        Command::Channel { action: ChannelAction::Validate { channel } } => commands::channel_validate(channel),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let code = match run(&cli) {
        Ok(outcome) => {
            let mut code = outcome.exit_code;
            for (path, contents) in &outcome.files {
                if let Err(e) = std::fs::write(path, contents) {
                    eprintln!("error: writing {}: {e}", path.display());
                    code = 2;
                }
            }
            println!("{}", report::to_string(&outcome.report.to_json()));
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    ExitCode::from(code as u8)
}
