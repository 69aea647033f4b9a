//! Result rows and CSV emission.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use super::config::{ExperimentKind, ExperimentSpec};
use crate::error::Result;

pub const COLUMNS: [&str; 10] =
    ["experiment", "N", "eps", "K", "tau", "quantity", "value", "bound", "fitted_constant", "pass"];

/// One measured quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: ExperimentKind,
    pub n: Option<usize>,
    pub eps: Option<f64>,
    pub k: Option<usize>,
    pub tau: Option<f64>,
    pub quantity: String,
    pub value: f64,
    pub bound: Option<f64>,
    pub fitted_constant: Option<f64>,
    pub pass: Option<bool>,
    /// Seconds spent producing the row; reported only in the header.
    pub wall_time: f64,
}

impl ResultRow {
    pub fn new(experiment: ExperimentKind, quantity: impl Into<String>, value: f64) -> Self {
        Self {
            experiment,
            n: None,
            eps: None,
            k: None,
            tau: None,
            quantity: quantity.into(),
            value,
            bound: None,
            fitted_constant: None,
            pass: None,
            wall_time: 0.0,
        }
    }

    pub fn chain(mut self, n: usize, k: Option<usize>) -> Self {
        self.n = Some(n);
        self.eps = Some(crate::lattice::eps_of(n));
        self.k = k;
        self
    }

    pub fn tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn bound(mut self, bound: f64) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn fitted(mut self, c: f64) -> Self {
        self.fitted_constant = Some(c);
        self
    }

    pub fn pass(mut self, pass: bool) -> Self {
        self.pass = Some(pass);
        self
    }

    pub fn timed(mut self, secs: f64) -> Self {
        self.wall_time = secs;
        self
    }

    fn fields(&self) -> [String; 10] {
        let num = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
        let int = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.experiment.label().to_string(),
            int(self.n),
            num(self.eps),
            int(self.k),
            num(self.tau),
            self.quantity.clone(),
            fmt_num(self.value),
            num(self.bound),
            num(self.fitted_constant),
            self.pass.map(|p| p.to_string()).unwrap_or_default(),
        ]
    }
}

/// Fixed-width scientific notation.
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.10e}")
    } else {
        v.to_string()
    }
}

/// Deterministic order: by `N` (rows without one last), then generation order.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by_key(|r| r.n.unwrap_or(usize::MAX));
}

/// Writes the header comment block and the rows.
pub fn write_csv<W: Write>(mut out: W, spec: &ExperimentSpec, rows: &[ResultRow], wall_time: f64) -> Result<()> {
    let stamp = SystemTime::now()
        .duration_since(SystemTime::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    writeln!(out, "# acfield {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# timestamp = {stamp} (unix seconds), wall_time = {wall_time:.3} s")?;
    writeln!(out, "# seed = {}", spec.seed)?;
    for line in spec.to_config_string().lines() {
        if line.is_empty() {
            writeln!(out, "#")?;
        } else {
            writeln!(out, "# {line}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// `<dir>/<kind>.csv`.
pub fn output_path(dir: &Path, kind: ExperimentKind) -> PathBuf {
    dir.join(format!("{}.csv", kind.label()))
}

/// Lines of a CSV file that are not header comments.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}
