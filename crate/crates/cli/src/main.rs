mod commands;
mod config;
mod output;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use config::{Cli, Command};
use output::{pretty, to_value};

const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;

fn dispatch(cli: &Cli) -> anyhow::Result<(serde_json::Value, bool)> {
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::Params(a) => (commands::params(a)?, true),
        Command::Curves(a) => (commands::curves(a)?, true),
        Command::Run(a) => (commands::run(a, seed)?, true),
        Command::Attack(a) => (commands::attack(a, seed)?, true),
        Command::Verify(a) => {
            let checks = verify::run(a, seed);
            for c in &checks {
                eprintln!("{} {} ({:.2}s): {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.seconds, c.detail);
            }
            let passed = checks.iter().all(|c| c.passed);
            let v = to_value(&json!({"status": "ok", "passed": passed, "seed": seed, "checks": checks}))?;
            (v, passed)
        }
    })
}

fn emit(v: &serde_json::Value) {
    let _ = writeln!(std::io::stdout().lock(), "{}", pretty(v));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok((v, ok)) => {
            emit(&v);
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ERROR)
            }
        }
        Err(e) => match e.downcast_ref::<nsm_core::Error>().and_then(commands::infeasible_value) {
            Some(v) => {
                emit(&v);
                ExitCode::from(EXIT_INFEASIBLE)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_ERROR)
            }
        },
    }
}
