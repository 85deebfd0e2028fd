mod args;
mod commands;
mod error;
mod report;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::Cli;
use report::Report;

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("GLSX_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("GLSX_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let format = cli.common.format;
    let output = cli.common.output.as_deref();
    match commands::run(&cli) {
        Ok(report) => match report.write(format, output) {
            Ok(()) if report.passed => ExitCode::SUCCESS,
            Ok(()) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            let failed = Report {
                command: cli.command.name(),
                config: json!({ "seed": cli.common.seed }),
                passed: false,
                result: json!({ "error": e.to_string() }),
                table: None,
            };
            if let Some(path) = output {
                if let Err(w) = failed.write(format, Some(path)) {
                    eprintln!("error: {w}");
                }
            }
            ExitCode::from(2)
        }
    }
}
