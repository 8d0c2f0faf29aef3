use std::process::ExitCode;

use clap::Parser;
use jointbound::cli::{execute, Cli, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::from(Cli::parse());
    match execute(&config) {
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {}: value {:e}, bound {:e}, tolerance {:e}", c.name, c.value, c.bound, c.tolerance);
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("jointbound: {e}");
            ExitCode::from(2)
        }
    }
}
