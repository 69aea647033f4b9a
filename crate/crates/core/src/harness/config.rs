//! Line-based experiment specifications.
//!
//! ```text
//! [experiment]
//! kind = error-convergence
//! seed = 7
//!
//! [chain]
//! N = 40, 80, 160
//! K = N/4
//! ```
//!
//! Sections are `[experiment]`, `[model]`, `[chain]`, `[force]` and `[sweep]`.
//! `#` and `;` start comments. Only `experiment.kind` is required.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::density::{BumpProfile, BumpShape, Params};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExperimentKind {
    GradientAudit,
    SolverConvergence,
    OptimalBc,
    GhostForce,
    CbClosedForm,
    FieldBound,
    Stability,
    ErrorConvergence,
    BcGap,
    ConsistencySweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::GradientAudit,
        ExperimentKind::SolverConvergence,
        ExperimentKind::OptimalBc,
        ExperimentKind::GhostForce,
        ExperimentKind::CbClosedForm,
        ExperimentKind::FieldBound,
        ExperimentKind::Stability,
        ExperimentKind::ErrorConvergence,
        ExperimentKind::BcGap,
        ExperimentKind::ConsistencySweep,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ExperimentKind::GradientAudit => "gradient-audit",
            ExperimentKind::SolverConvergence => "solver-convergence",
            ExperimentKind::OptimalBc => "optimal-bc",
            ExperimentKind::GhostForce => "ghost-force",
            ExperimentKind::CbClosedForm => "cb-closed-form",
            ExperimentKind::FieldBound => "field-bound",
            ExperimentKind::Stability => "stability",
            ExperimentKind::ErrorConvergence => "error-convergence",
            ExperimentKind::BcGap => "bc-gap",
            ExperimentKind::ConsistencySweep => "consistency-sweep",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| format!("unknown experiment kind `{s}`"))
    }
}

/// How `K` follows from `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KRule {
    /// `K = floor(N / d)`.
    Fraction(usize),
    Fixed(usize),
}

impl KRule {
    pub fn k(&self, n: usize) -> usize {
        match *self {
            KRule::Fraction(d) => n / d,
            KRule::Fixed(k) => k,
        }
    }
}

impl fmt::Display for KRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KRule::Fraction(d) => write!(f, "N/{d}"),
            KRule::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for KRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.replace(' ', "");
        if let Some(d) = s.strip_prefix("N/") {
            match d.parse::<usize>() {
                Ok(d) if d > 0 => Ok(KRule::Fraction(d)),
                _ => Err(format!("bad K rule `{s}`")),
            }
        } else {
            s.parse().map(KRule::Fixed).map_err(|_| format!("expected an integer or `N/d`, got `{s}`"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceShape {
    None,
    Sine,
}

impl FromStr for ForceShape {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(ForceShape::None),
            "sine" => Ok(ForceShape::Sine),
            _ => Err(format!("unknown force shape `{s}`")),
        }
    }
}

impl fmt::Display for ForceShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForceShape::None => "none",
            ForceShape::Sine => "sine",
        })
    }
}

fn shape_label(s: BumpShape) -> &'static str {
    match s {
        BumpShape::Quartic => "quartic",
        BumpShape::Sextic => "sextic",
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub output: PathBuf,
    pub m: f64,
    pub strain: f64,
    pub sigma0: f64,
    pub profile: BumpShape,
    /// Ascending, without duplicates.
    pub n_list: Vec<usize>,
    pub k_rule: KRule,
    pub tau_max: f64,
    pub mesh_points: usize,
    pub force_shape: ForceShape,
    pub force_amplitude: f64,
    pub force_mode: u32,
    /// Macroscopic strains of the ghost-force sweep.
    pub strains: Vec<f64>,
    /// Random configurations per check.
    pub configurations: usize,
    /// Kink distances from the interface, in cells.
    pub offsets: Vec<usize>,
    /// Displacement amplitudes of the field-bound sweep.
    pub amplitudes: Vec<f64>,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            seed: 0,
            output: PathBuf::from("results"),
            m: 1.0,
            strain: 1.1,
            sigma0: 0.5,
            profile: BumpShape::Quartic,
            n_list: vec![80],
            k_rule: KRule::Fraction(4),
            tau_max: 1e-8,
            mesh_points: 16,
            force_shape: ForceShape::Sine,
            force_amplitude: 0.5,
            force_mode: 1,
            strains: vec![1.0, 1.2, 1.5],
            configurations: 5,
            offsets: (1..=10).collect(),
            amplitudes: vec![0.01, 0.05],
        }
    }

    pub fn params(&self) -> Result<Params> {
        Params::new(self.m, BumpProfile::new(self.profile, self.sigma0)?)
    }

    pub fn k(&self, n: usize) -> usize {
        self.k_rule.k(n)
    }

    pub fn validate(&self) -> Result<()> {
        let param = |msg: String| Err(Error::Param(msg));
        if !(self.m > 0.0) {
            return param(format!("m = {} must be positive", self.m));
        }
        if !(self.sigma0 > 0.0) {
            return param(format!("sigma0 = {} must be positive", self.sigma0));
        }
        if !(self.strain > self.sigma0) {
            return param(format!("F = {} must exceed sigma0 = {}", self.strain, self.sigma0));
        }
        if self.n_list.is_empty() {
            return param("N list is empty".into());
        }
        for &n in &self.n_list {
            let k = self.k(n);
            if k == 0 || k >= n {
                return Err(Error::Partition { k, n });
            }
        }
        if !(self.tau_max > 0.0 && self.tau_max < 1.0) {
            return param(format!("tau_max = {} must lie in (0, 1)", self.tau_max));
        }
        if self.mesh_points < 2 {
            return param("mesh_points must be at least 2".into());
        }
        if self.configurations == 0 {
            return param("configurations must be positive".into());
        }
        if let Some(s) = self.strains.iter().find(|&&s| !(s > self.sigma0)) {
            return param(format!("sweep strain {s} must exceed sigma0"));
        }
        if self.offsets.iter().any(|&d| d == 0) {
            return param("offsets must be positive".into());
        }
        Ok(())
    }

    /// The spec in the configuration syntax, every key written out.
    pub fn to_config_string(&self) -> String {
        let list = |v: &[String]| v.join(", ");
        let nums = |v: &[f64]| list(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        let ints = |v: &[usize]| list(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        format!(
            "[experiment]\nkind = {}\nseed = {}\noutput = {}\n\n\
             [model]\nm = {}\nF = {}\nsigma0 = {}\nprofile = {}\n\n\
             [chain]\nN = {}\nK = {}\ntau_max = {:e}\nmesh_points = {}\n\n\
             [force]\nshape = {}\namplitude = {}\nmode = {}\n\n\
             [sweep]\nstrains = {}\nconfigurations = {}\noffsets = {}\namplitudes = {}\n",
            self.kind,
            self.seed,
            self.output.display(),
            self.m,
            self.strain,
            self.sigma0,
            shape_label(self.profile),
            ints(&self.n_list),
            self.k_rule,
            self.tau_max,
            self.mesh_points,
            self.force_shape,
            self.force_amplitude,
            self.force_mode,
            nums(&self.strains),
            self.configurations,
            ints(&self.offsets),
            nums(&self.amplitudes),
        )
    }
}

const KEYS: &[(&str, &[&str])] = &[
    ("experiment", &["kind", "seed", "output"]),
    ("model", &["m", "F", "sigma0", "profile"]),
    ("chain", &["N", "K", "tau_max", "mesh_points"]),
    ("force", &["shape", "amplitude", "mode"]),
    ("sweep", &["strains", "configurations", "offsets", "amplitudes"]),
];

fn parse_value<T: FromStr>(line: usize, key: &str, v: &str, what: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config { line, msg: format!("key `{key}`: expected {what}, got `{v}`") })
}

fn parse_list<T: FromStr>(line: usize, key: &str, v: &str, what: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(line, key, s, what))
        .collect()
}

/// Parses the configuration text.
pub fn parse_spec_str(text: &str) -> Result<ExperimentSpec> {
    let mut section: Option<&str> = None;
    let mut seen: HashMap<(String, String), usize> = HashMap::new();
    let mut entries: Vec<(usize, &str, &str, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split(['#', ';']).next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Config { line, msg: format!("malformed section header `{body}`") })?
                .trim();
            let known = KEYS
                .iter()
                .find(|(s, _)| *s == name)
                .ok_or_else(|| Error::Config { line, msg: format!("unknown section [{name}]") })?;
            section = Some(known.0);
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| Error::Config { line, msg: format!("expected `key = value`, got `{body}`") })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::Config { line, msg: "missing key before `=`".into() });
        }
        let sec = section.ok_or_else(|| Error::Config { line, msg: format!("key `{key}` outside any section") })?;
        let allowed = KEYS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(Error::Config { line, msg: format!("unknown key `{key}` in section [{sec}]") });
        }
        if let Some(first) = seen.insert((sec.to_string(), key.to_string()), line) {
            return Err(Error::Config {
                line,
                msg: format!("duplicate key `{key}` in [{sec}] (first set on line {first}, again on line {line})"),
            });
        }
        if value.is_empty() {
            return Err(Error::Config { line, msg: format!("key `{key}` has no value") });
        }
        entries.push((line, sec, key, value));
    }
    let kind = entries
        .iter()
        .find(|e| e.1 == "experiment" && e.2 == "kind")
        .ok_or_else(|| Error::MissingKey { section: "experiment".into(), key: "kind".into() })?;
    let kind: ExperimentKind = kind.3.parse().map_err(|msg| Error::Config { line: kind.0, msg })?;
    let mut spec = ExperimentSpec::new(kind);
    for (line, sec, key, v) in entries {
        let cfg = |msg: String| Error::Config { line, msg };
        match (sec, key) {
            ("experiment", "kind") => {}
            ("experiment", "seed") => spec.seed = parse_value(line, key, v, "an unsigned integer")?,
            ("experiment", "output") => spec.output = PathBuf::from(v),
            ("model", "m") => spec.m = parse_value(line, key, v, "a number")?,
            ("model", "F") => spec.strain = parse_value(line, key, v, "a number")?,
            ("model", "sigma0") => spec.sigma0 = parse_value(line, key, v, "a number")?,
            ("model", "profile") => {
                spec.profile = match v {
                    "quartic" => BumpShape::Quartic,
                    "sextic" => BumpShape::Sextic,
                    _ => return Err(cfg(format!("key `profile`: expected quartic or sextic, got `{v}`"))),
                }
            }
            ("chain", "N") => {
                let mut n: Vec<usize> = parse_list(line, key, v, "a list of integers")?;
                n.sort_unstable();
                n.dedup();
                spec.n_list = n;
            }
            ("chain", "K") => spec.k_rule = v.parse().map_err(|m: String| cfg(format!("key `K`: {m}")))?,
            ("chain", "tau_max") => spec.tau_max = parse_value(line, key, v, "a number")?,
            ("chain", "mesh_points") => spec.mesh_points = parse_value(line, key, v, "an integer")?,
            ("force", "shape") => spec.force_shape = v.parse().map_err(cfg)?,
            ("force", "amplitude") => spec.force_amplitude = parse_value(line, key, v, "a number")?,
            ("force", "mode") => spec.force_mode = parse_value(line, key, v, "an integer")?,
            ("sweep", "strains") => spec.strains = parse_list(line, key, v, "a list of numbers")?,
            ("sweep", "configurations") => spec.configurations = parse_value(line, key, v, "an integer")?,
            ("sweep", "offsets") => spec.offsets = parse_list(line, key, v, "a list of integers")?,
            ("sweep", "amplitudes") => spec.amplitudes = parse_list(line, key, v, "a list of numbers")?,
            _ => unreachable!("keys are checked against KEYS"),
        }
    }
    spec.validate()?;
    Ok(spec)
}

pub fn parse_spec(path: &Path) -> Result<ExperimentSpec> {
    parse_spec_str(&std::fs::read_to_string(path)?)
}
