//! `zitterlab` — run a configured scenario and write its CSV/JSON artifacts.
//!
//! Exit codes: 0 pass, 1 check failure (with `--check`), 2 config error,
//! 3 runtime error.

mod config;
mod report;
mod scenarios;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{parse_config, Scenario};
use report::Sink;

const EXIT_CHECK: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "zitterlab",
    about = "Four-point particle and pilot-wave numerical laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a TOML config file.
    Run {
        config: PathBuf,
        /// Exit with status 1 if any acceptance check fails.
        #[arg(long)]
        check: bool,
        /// Output directory, overriding `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available scenarios.
    ListScenarios,
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Run { config, check, out } => run(config, check, out),
        Command::ListScenarios => {
            for s in Scenario::ALL {
                println!("{:<18} {}", s.name(), s.describe());
            }
            ExitCode::SUCCESS
        }
        Command::Version => {
            println!("zitterlab {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
    }
}

fn run(path: PathBuf, check: bool, out: Option<PathBuf>) -> ExitCode {
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let dir = out.unwrap_or_else(|| config.output.dir.clone());
    let result = Sink::create(&dir).and_then(|mut sink| {
        let checks = scenarios::run_scenario(&config, &mut sink)?;
        Ok((checks, sink))
    });
    let (checks, sink) = match result {
        Ok(v) => v,
        Err(e) => {
            eprintln!("runtime error: {e:#}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };

    println!("scenario {} → {}", config.scenario, sink.dir().display());
    for f in sink.written() {
        println!("  wrote {f}");
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    for c in &checks {
        println!(
            "  {} {:<26} {:.6e} (limit {:.3e}; {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.limit,
            c.detail
        );
    }
    println!("{} checks, {failed} failed", checks.len());
    if check && failed > 0 {
        ExitCode::from(EXIT_CHECK)
    } else {
        ExitCode::SUCCESS
    }
}
