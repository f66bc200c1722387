use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use nosig_cli::{exit_code, run_suite, write_json, Suite, SuiteConfig};

/// Randomized verification of no-signaling and local observability.
#[derive(Debug, Parser)]
#[command(name = "nosig", version)]
struct Args {
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 2)]
    d1: usize,
    #[arg(long, default_value_t = 2)]
    d2: usize,
    #[arg(long, default_value_t = 2)]
    outcomes: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Write the report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Built-in fixture name or path to a fixture JSON file.
    #[arg(long)]
    fixture: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = SuiteConfig {
        suite: args.suite,
        seed: args.seed,
        trials: args.trials,
        d1: args.d1,
        d2: args.d2,
        outcomes: args.outcomes,
        tol: args.tol,
        json_path: args.json,
        fixture: args.fixture,
    };
    let run = match run_suite(&cfg) {
        Ok(run) => run,
        Err(e) => {
            eprintln!("nosig: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    print!("{}", run.table);
    println!(
        "overall: {}",
        if exit_code(&run.report) == 0 {
            "pass"
        } else {
            "FAIL"
        }
    );
    if let Some(path) = &cfg.json_path {
        if let Err(e) = write_json(&run.report, path) {
            eprintln!("nosig: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    }
    ExitCode::from(exit_code(&run.report) as u8)
}
