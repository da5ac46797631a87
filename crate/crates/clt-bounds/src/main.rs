use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use clt_bounds::cli::{execute, Cli};
use clt_bounds::error::{CliResult, EXIT_OK, EXIT_VERIFICATION};
use clt_bounds::output::write_atomic;

fn run(cli: &Cli) -> CliResult<i32> {
    let (outcome, out) = execute(&cli.command)?;
    if let Some(seed) = outcome.seed {
        eprintln!("seed: {seed}");
    }
    let text = outcome.render(out.format)?;
    match &out.output {
        Some(path) => write_atomic(path, &text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    if outcome.verified() {
        Ok(EXIT_OK)
    } else {
        eprintln!("{}: {} check(s) failed", outcome.command, outcome.failures.len());
        for f in &outcome.failures {
            eprintln!("{}", serde_json::to_string(f).unwrap_or_default());
        }
        Ok(EXIT_VERIFICATION)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        // help/version exit 0, usage errors exit 2
        Err(e) => e.exit(),
    };
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
