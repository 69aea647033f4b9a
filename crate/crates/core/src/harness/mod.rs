//! Experiment specifications, the canned experiments and CSV output.

pub mod config;
pub mod experiments;
pub mod output;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{parse_spec, parse_spec_str, ExperimentKind, ExperimentSpec, ForceShape, KRule};
pub use experiments::run_experiment;
pub use output::{csv_body, write_csv, ResultRow};

use crate::error::Result;

/// Rows of one experiment and the hard invariants that failed.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub spec: ExperimentSpec,
    pub rows: Vec<ResultRow>,
    pub hard_failures: Vec<String>,
    pub path: PathBuf,
}

/// Whether a failed row of this kind makes the run fail.
pub fn is_hard(kind: ExperimentKind) -> bool {
    matches!(kind, ExperimentKind::GradientAudit | ExperimentKind::GhostForce)
}

/// Runs the experiment and writes `<dir>/<kind>.csv`.
pub fn run(spec: &ExperimentSpec, dir: &Path) -> Result<RunOutcome> {
    let t0 = Instant::now();
    let mut rows = run_experiment(spec)?;
    output::sort_rows(&mut rows);
    std::fs::create_dir_all(dir)?;
    let path = output::output_path(dir, spec.kind);
    write_csv(BufWriter::new(File::create(&path)?), spec, &rows, t0.elapsed().as_secs_f64())?;
    let hard_failures = if is_hard(spec.kind) {
        rows.iter()
            .filter(|r| r.pass == Some(false))
            .map(|r| format!("{} N={:?}: {} = {:e}", r.experiment, r.n, r.quantity, r.value))
            .collect()
    } else {
        Vec::new()
    };
    Ok(RunOutcome { spec: spec.clone(), rows, hard_failures, path })
}

/// The built-in audit suite: every experiment at desk-check sizes.
pub fn check_suite(seed: u64) -> Vec<ExperimentSpec> {
    ExperimentKind::ALL
        .into_iter()
        .map(|kind| {
            let mut s = ExperimentSpec::new(kind);
            s.seed = seed;
            s.output = PathBuf::from("acfield-check");
            s.n_list = vec![40];
            s.configurations = 2;
            match kind {
                ExperimentKind::SolverConvergence => s.n_list = vec![20],
                ExperimentKind::Stability => s.offsets = vec![2, 3, 4, 5],
                ExperimentKind::ErrorConvergence | ExperimentKind::ConsistencySweep => s.n_list = vec![40, 80],
                _ => {}
            }
            s
        })
        .collect()
}

/// Sizes the global worker pool from `jobs` or `ACFIELD_JOBS`.
pub fn configure_jobs(jobs: Option<usize>) -> Result<()> {
    let jobs = match jobs {
        Some(j) => Some(j),
        None => match std::env::var("ACFIELD_JOBS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                crate::error::Error::Param(format!("ACFIELD_JOBS must be a positive integer, got `{v}`"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(j) = jobs {
        if j == 0 {
            return Err(crate::error::Error::Param("job count must be positive".into()));
        }
        // a pool that is already set up is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    Ok(())
}
