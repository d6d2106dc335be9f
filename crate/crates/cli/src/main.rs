mod args;
mod commands;
mod error;
mod report;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use error::CliError;
use report::RunReport;

fn input_of(cmd: &Command) -> (&'static str, &Path) {
    match cmd {
        Command::Decide(a) => ("decide", &a.input),
        Command::Synthesize(a) => ("synthesize", &a.input),
        Command::Simulate(a) => ("simulate", &a.input),
        Command::Pairgraph(a) => ("pairgraph", &a.input),
        Command::Reduce(a) => ("reduce", &a.input),
    }
}

fn dispatch(cmd: &Command, bytes: &[u8]) -> Result<commands::Outcome, CliError> {
    match cmd {
        Command::Decide(_) => commands::decide(bytes),
        Command::Synthesize(a) => commands::synthesize(a, bytes),
        Command::Simulate(a) => commands::simulate(a, bytes),
        Command::Pairgraph(a) => commands::pairgraph(a, bytes),
        Command::Reduce(a) => commands::reduce_cmd(a, bytes),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }

    let (name, path) = input_of(&cli.command);
    let bytes = match commands::read(path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };

    let mut report = RunReport::new(name, std::env::args().skip(1).collect(), &bytes);
    let code = match dispatch(&cli.command, &bytes) {
        Ok(out) => {
            print!("{}", out.stdout);
            report.payload = out.payload;
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            report.payload = json!({ "error": e.to_string() });
            e.exit_code()
        }
    };
    report.exit_code = code;
    if cli.timing {
        report.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
