use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cremona_core::scenario::{builtin, list_scenarios, resolve, run_scenario, ScenarioReport};

/// Reproduce Cremona-equivalence computations for projected surfaces.
#[derive(Parser)]
#[command(name = "cremona", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in scenario by name, or a scenario file by path.
    Run {
        scenario: String,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the markdown transcript here instead of printing it.
        #[arg(long)]
        md: Option<PathBuf>,
        /// Per-unknown bound for the feasibility search.
        #[arg(long)]
        bound: Option<u64>,
    },
    /// List the built-in scenarios.
    List,
    /// Run every built-in scenario.
    CheckAll {
        #[arg(long)]
        bound: Option<u64>,
    },
}

fn summary(r: &ScenarioReport) -> String {
    format!(
        "{}: {} ({})",
        r.scenario,
        if r.passed() { "PASS" } else { "FAIL" },
        r.verdict().unwrap_or("no verdict")
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for name in list_scenarios() {
                let desc = builtin(name).map(|s| s.description).unwrap_or_default();
                println!("{name}\t{desc}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { scenario, json, md, bound } => {
            let s = match resolve(&scenario) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let report = run_scenario(&s, bound);
            if let Some(path) = &json {
                if let Err(e) = std::fs::write(path, report.to_json_pretty() + "\n") {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            match &md {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, report.to_markdown()) {
                        eprintln!("error: writing {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                    println!("{}", summary(&report));
                }
                None => print!("{}", report.to_markdown()),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::CheckAll { bound } => {
            let mut ok = true;
            for name in list_scenarios() {
                match builtin(name) {
                    Ok(s) => {
                        let r = run_scenario(&s, bound);
                        ok &= r.passed();
                        println!("{}", summary(&r));
                    }
                    Err(e) => {
                        ok = false;
                        println!("{name}: ERROR ({e})");
                    }
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
