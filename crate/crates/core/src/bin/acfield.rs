use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use acfield::harness::{self, RunOutcome};

#[derive(Parser)]
#[command(name = "acfield", about = "Field-based atomistic chain and a/c coupling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described in a spec file.
    Run {
        spec: PathBuf,
        /// Output directory (overrides `output` in the spec).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (falls back to ACFIELD_JOBS).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the built-in audit suite.
    Check {
        #[arg(long, default_value = "acfield-check")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the version.
    Version,
}

fn report(outcome: &RunOutcome) -> bool {
    let failed = outcome.rows.iter().filter(|r| r.pass == Some(false)).count();
    println!(
        "{:<20} {:>3} rows, {} failed checks -> {}",
        outcome.spec.kind.label(),
        outcome.rows.len(),
        failed,
        outcome.path.display()
    );
    for f in &outcome.hard_failures {
        eprintln!("  hard failure: {f}");
    }
    outcome.hard_failures.is_empty()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Version => {
            println!("acfield {}", env!("CARGO_PKG_VERSION"));
            return ExitCode::SUCCESS;
        }
        Command::Run { spec, out, seed, jobs } => harness::configure_jobs(jobs).and_then(|_| {
            let mut spec = harness::parse_spec(&spec)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let dir = out.unwrap_or_else(|| spec.output.clone());
            harness::run(&spec, &dir).map(|o| report(&o))
        }),
        Command::Check { out, seed, jobs } => harness::configure_jobs(jobs).and_then(|_| {
            let mut ok = true;
            for spec in harness::check_suite(seed) {
                ok &= report(&harness::run(&spec, &out)?);
            }
            Ok(ok)
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
