use std::process::ExitCode;

use clap::Parser;

use replicator_cli::args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match replicator_cli::run(&cli) {
        Ok((outcome, json)) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if json {
                println!("{}", outcome.record.to_json());
            } else {
                print!("{}", outcome.text);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
