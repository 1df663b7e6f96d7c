//! Strict experiment configs: a TOML schema with exhaustive validation.
//!
//! Parsing is two-phase. The raw TOML tree is walked first, collecting
//! every problem at once: unknown keys, keys that exist in the schema but
//! mean nothing for the chosen experiment, type mismatches, out-of-range
//! values, and missing required fields. Only a clean walk produces a
//! resolved config, with documented defaults filled in.

use std::path::PathBuf;

use serde::Serialize;
use toml::value::{Table, Value};

use crate::error::{Error, Result};
use crate::lattice::Boundary;
use crate::potential::CouplingDistribution;

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    TorusLemma,
    CommutatorIdentity,
    HypothesisCheck,
    Lemma1,
    Mourre,
    LambdaScan,
    Weyl,
    Spectrum,
    Dos,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::TorusLemma,
        Experiment::CommutatorIdentity,
        Experiment::HypothesisCheck,
        Experiment::Lemma1,
        Experiment::Mourre,
        Experiment::LambdaScan,
        Experiment::Weyl,
        Experiment::Spectrum,
        Experiment::Dos,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::TorusLemma => "torus-lemma",
            Experiment::CommutatorIdentity => "commutator-identity",
            Experiment::HypothesisCheck => "hypothesis-check",
            Experiment::Lemma1 => "lemma1",
            Experiment::Mourre => "mourre",
            Experiment::LambdaScan => "lambda-scan",
            Experiment::Weyl => "weyl",
            Experiment::Spectrum => "spectrum",
            Experiment::Dos => "dos",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|e| e.name() == name)
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Potential geometry selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    Annular,
    SingleBump,
    Stationary,
}

/// Data-file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A validated experiment description with all defaults resolved.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub output_path: PathBuf,
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<usize>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub half_side: Option<i64>,
    pub boundary: Boundary,
    pub layout: Layout,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub base_scale: Option<i64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub annuli: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bump_radius: Option<i64>,
    pub plateau_radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<CouplingDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub trials: usize,
    pub bins: usize,
    pub collar: i64,
    pub mass_cutoff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub windows: Option<Vec<i64>>,
    pub ell: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_targets: Option<Vec<f64>>,
}

const DEFAULT_PLATEAU_RADIUS: f64 = 0.5;
const DEFAULT_COLLAR: i64 = 5;
const DEFAULT_MASS_CUTOFF: f64 = 0.01;
const DEFAULT_TRIALS: usize = 100;
const DEFAULT_BINS: usize = 40;
const DEFAULT_ELL: u64 = 100;

/// Every key the schema knows, so typos can be told apart from keys that
/// merely belong to a different experiment.
const SCHEMA_KEYS: &[&str] = &[
    "experiment",
    "output_path",
    "format",
    "nu",
    "L",
    "boundary",
    "layout",
    "M",
    "K",
    "bump_radius",
    "plateau_radius",
    "distribution",
    "lambda",
    "lambda_grid",
    "a",
    "b",
    "delta",
    "grid",
    "seeds",
    "seed",
    "trials",
    "bins",
    "collar",
    "mass_cutoff",
    "energies",
    "windows",
    "ell",
    "coupling_targets",
];

const GLOBAL_KEYS: &[&str] = &["experiment", "output_path", "format"];

/// Keys each experiment accepts beyond the global three: `(required, optional)`.
fn experiment_keys(e: Experiment) -> (&'static [&'static str], &'static [&'static str]) {
    const LAYOUT_OPT: &[&str] = &["layout", "M", "K", "bump_radius", "plateau_radius"];
    match e {
        Experiment::TorusLemma => (&["nu", "delta", "grid"], &[]),
        Experiment::CommutatorIdentity => (&["nu", "L"], &["seed", "trials", "boundary"]),
        Experiment::HypothesisCheck => (
            &["nu", "L", "M", "K"],
            &["plateau_radius", "boundary"],
        ),
        Experiment::Lemma1 => (
            &["nu", "L", "lambda_grid", "a", "b", "seeds", "distribution"],
            &[
                "layout",
                "M",
                "K",
                "bump_radius",
                "plateau_radius",
                "boundary",
            ],
        ),
        Experiment::Mourre => (
            &["nu", "L", "lambda", "a", "b", "seeds", "distribution"],
            &[
                "layout",
                "M",
                "K",
                "bump_radius",
                "plateau_radius",
                "boundary",
                "collar",
                "mass_cutoff",
            ],
        ),
        Experiment::LambdaScan => (
            &["nu", "L", "lambda_grid", "a", "b", "seeds", "distribution"],
            &[
                "layout",
                "M",
                "K",
                "bump_radius",
                "plateau_radius",
                "boundary",
                "collar",
                "mass_cutoff",
            ],
        ),
        Experiment::Weyl => (
            &[
                "nu",
                "L",
                "lambda",
                "energies",
                "windows",
                "ell",
                "seed",
                "distribution",
            ],
            &[
                "layout",
                "M",
                "K",
                "bump_radius",
                "plateau_radius",
                "boundary",
                "coupling_targets",
            ],
        ),
        Experiment::Spectrum => (
            &["nu", "L", "lambda", "seed", "distribution"],
            &[
                "layout",
                "M",
                "K",
                "bump_radius",
                "plateau_radius",
                "boundary",
            ],
        ),
        Experiment::Dos => (
            &["nu", "L", "lambda", "seed", "distribution", "bins"],
            LAYOUT_OPT,
        ),
    }
}

struct Walker<'a> {
    table: &'a Table,
    errors: Vec<String>,
}

impl<'a> Walker<'a> {
    fn get_i64(&mut self, key: &str) -> Option<i64> {
        match self.table.get(key) {
            None => None,
            Some(Value::Integer(v)) => Some(*v),
            Some(other) => {
                self.errors
                    .push(format!("{key}: expected an integer, got {}", kind(other)));
                None
            }
        }
    }

    fn get_f64(&mut self, key: &str) -> Option<f64> {
        match self.table.get(key) {
            None => None,
            Some(Value::Float(v)) => Some(*v),
            Some(Value::Integer(v)) => Some(*v as f64),
            Some(other) => {
                self.errors
                    .push(format!("{key}: expected a number, got {}", kind(other)));
                None
            }
        }
    }

    fn get_str(&mut self, key: &str) -> Option<&'a str> {
        match self.table.get(key) {
            None => None,
            Some(Value::String(v)) => Some(v.as_str()),
            Some(other) => {
                self.errors
                    .push(format!("{key}: expected a string, got {}", kind(other)));
                None
            }
        }
    }

    fn get_f64_array(&mut self, key: &str) -> Option<Vec<f64>> {
        let arr = match self.table.get(key) {
            None => return None,
            Some(Value::Array(a)) => a,
            Some(other) => {
                self.errors
                    .push(format!("{key}: expected an array, got {}", kind(other)));
                return None;
            }
        };
        let mut out = Vec::with_capacity(arr.len());
        for (i, v) in arr.iter().enumerate() {
            match v {
                Value::Float(f) => out.push(*f),
                Value::Integer(n) => out.push(*n as f64),
                other => {
                    self.errors
                        .push(format!("{key}[{i}]: expected a number, got {}", kind(other)));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn get_u64_array(&mut self, key: &str) -> Option<Vec<u64>> {
        let arr = match self.table.get(key) {
            None => return None,
            Some(Value::Array(a)) => a,
            Some(other) => {
                self.errors
                    .push(format!("{key}: expected an array, got {}", kind(other)));
                return None;
            }
        };
        let mut out = Vec::with_capacity(arr.len());
        for (i, v) in arr.iter().enumerate() {
            match v {
                Value::Integer(n) if *n >= 0 => out.push(*n as u64),
                other => {
                    self.errors.push(format!(
                        "{key}[{i}]: expected a nonnegative integer, got {}",
                        kind(other)
                    ));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn get_i64_array(&mut self, key: &str) -> Option<Vec<i64>> {
        let arr = match self.table.get(key) {
            None => return None,
            Some(Value::Array(a)) => a,
            Some(other) => {
                self.errors
                    .push(format!("{key}: expected an array, got {}", kind(other)));
                return None;
            }
        };
        let mut out = Vec::with_capacity(arr.len());
        for (i, v) in arr.iter().enumerate() {
            match v {
                Value::Integer(n) => out.push(*n),
                other => {
                    self.errors
                        .push(format!("{key}[{i}]: expected an integer, got {}", kind(other)));
                    return None;
                }
            }
        }
        Some(out)
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "a string",
        Value::Integer(_) => "an integer",
        Value::Float(_) => "a float",
        Value::Boolean(_) => "a boolean",
        Value::Datetime(_) => "a datetime",
        Value::Array(_) => "an array",
        Value::Table(_) => "a table",
    }
}

/// Allowed keys inside `[distribution]` per kind, checked recursively so
/// mixture children are held to the same standard.
fn walk_distribution(prefix: &str, value: &Value, errors: &mut Vec<String>) {
    let table = match value {
        Value::Table(t) => t,
        other => {
            errors.push(format!("{prefix}: expected a table, got {}", kind(other)));
            return;
        }
    };
    let kind_name = match table.get("kind") {
        Some(Value::String(s)) => s.as_str(),
        Some(other) => {
            errors.push(format!(
                "{prefix}.kind: expected a string, got {}",
                kind(other)
            ));
            return;
        }
        None => {
            errors.push(format!("{prefix}.kind: missing (atomic, uniform, or mixture)"));
            return;
        }
    };
    let allowed: &[&str] = match kind_name {
        "atomic" => &["kind", "points", "weights"],
        "uniform" => &["kind", "lo", "hi"],
        "mixture" => &["kind", "children", "weights"],
        other => {
            errors.push(format!(
                "{prefix}.kind: unknown distribution kind `{other}`"
            ));
            return;
        }
    };
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            errors.push(format!("{prefix}.{key}: unknown key"));
        }
    }
    if kind_name == "mixture" {
        if let Some(Value::Array(children)) = table.get("children") {
            for (i, child) in children.iter().enumerate() {
                walk_distribution(&format!("{prefix}.children[{i}]"), child, errors);
            }
        }
    }
}

/// Parses and validates config text, applying documented defaults
/// (`boundary = "dirichlet"`, `plateau_radius = 0.5`, `collar = 5`,
/// `mass_cutoff = 0.01`). All problems are reported together.
pub fn validate(config_text: &str) -> Result<ExperimentConfig> {
    let root: Value = toml::from_str(config_text)
        .map_err(|e| Error::Config(vec![format!("TOML syntax: {e}")]))?;
    let table = match &root {
        Value::Table(t) => t,
        _ => return Err(Error::Config(vec!["top level must be a table".into()])),
    };
    let mut w = Walker {
        table,
        errors: Vec::new(),
    };

    let experiment = match w.get_str("experiment") {
        Some(name) => match Experiment::from_name(name) {
            Some(e) => Some(e),
            None => {
                w.errors.push(format!(
                    "experiment: unknown experiment `{name}` (expected one of {})",
                    Experiment::ALL.map(|e| e.name()).join(", ")
                ));
                None
            }
        },
        None => {
            if !table.contains_key("experiment") {
                w.errors.push("experiment: missing".into());
            }
            None
        }
    };

    // Key admission: typos vs keys the chosen experiment does not read.
    for key in table.keys() {
        if !SCHEMA_KEYS.contains(&key.as_str()) {
            w.errors.push(format!("{key}: unknown key"));
        } else if let Some(e) = experiment {
            let (required, optional) = experiment_keys(e);
            if !GLOBAL_KEYS.contains(&key.as_str())
                && !required.contains(&key.as_str())
                && !optional.contains(&key.as_str())
            {
                w.errors
                    .push(format!("{key}: not used by experiment `{e}`"));
            }
        }
    }
    if let Some(e) = experiment {
        let (required, _) = experiment_keys(e);
        for key in required {
            if !table.contains_key(*key) {
                w.errors.push(format!("{key}: required by experiment `{e}`"));
            }
        }
    }

    let output_path = match w.get_str("output_path") {
        Some(p) if !p.is_empty() => Some(PathBuf::from(p)),
        Some(_) => {
            w.errors.push("output_path: must not be empty".into());
            None
        }
        None => {
            if !table.contains_key("output_path") {
                w.errors.push("output_path: missing".into());
            }
            None
        }
    };

    let format = match w.get_str("format") {
        Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => {
            w.errors
                .push(format!("format: expected `csv` or `json`, got `{other}`"));
            OutputFormat::Csv
        }
        None => OutputFormat::Csv,
    };

    let boundary = match w.get_str("boundary") {
        Some("dirichlet") => Boundary::Dirichlet,
        Some("periodic") => Boundary::Periodic,
        Some(other) => {
            w.errors.push(format!(
                "boundary: expected `dirichlet` or `periodic`, got `{other}`"
            ));
            Boundary::Dirichlet
        }
        None => Boundary::Dirichlet,
    };

    let layout = match w.get_str("layout") {
        Some("annular") => Layout::Annular,
        Some("single-bump") => Layout::SingleBump,
        Some("stationary") => Layout::Stationary,
        Some(other) => {
            w.errors.push(format!(
                "layout: expected `annular`, `single-bump`, or `stationary`, got `{other}`"
            ));
            Layout::Annular
        }
        None => Layout::Annular,
    };

    let nu = w.get_i64("nu").and_then(|v| {
        if (1..=4).contains(&v) {
            Some(v as usize)
        } else {
            w.errors
                .push(format!("nu: must lie in 1..=4, got {v}"));
            None
        }
    });
    let half_side = w.get_i64("L").and_then(|v| {
        if v >= 1 {
            Some(v)
        } else {
            w.errors.push(format!("L: must be at least 1, got {v}"));
            None
        }
    });
    let base_scale = w.get_i64("M").and_then(|v| {
        if v >= 4 && v % 2 == 0 {
            Some(v)
        } else {
            w.errors
                .push(format!("M: must be an even integer >= 4, got {v}"));
            None
        }
    });
    let annuli = w.get_i64("K").and_then(|v| {
        if v >= 0 {
            Some(v as usize)
        } else {
            w.errors.push(format!("K: must be nonnegative, got {v}"));
            None
        }
    });
    let bump_radius = w.get_i64("bump_radius").and_then(|v| {
        if v >= 1 {
            Some(v)
        } else {
            w.errors
                .push(format!("bump_radius: must be at least 1, got {v}"));
            None
        }
    });
    let plateau_radius = w
        .get_f64("plateau_radius")
        .map(|v| {
            if v > 0.0 && v < 1.0 {
                v
            } else {
                w.errors.push(format!(
                    "plateau_radius: must lie strictly between 0 and 1, got {v}"
                ));
                DEFAULT_PLATEAU_RADIUS
            }
        })
        .unwrap_or(DEFAULT_PLATEAU_RADIUS);
    let lambda = w.get_f64("lambda").and_then(|v| {
        if v.is_finite() && v >= 0.0 {
            Some(v)
        } else {
            w.errors
                .push(format!("lambda: must be a finite nonnegative number, got {v}"));
            None
        }
    });
    let lambda_grid = w.get_f64_array("lambda_grid").and_then(|grid| {
        if grid.is_empty() {
            w.errors.push("lambda_grid: must not be empty".into());
            return None;
        }
        for (i, v) in grid.iter().enumerate() {
            if !(v.is_finite() && *v >= 0.0) {
                w.errors.push(format!(
                    "lambda_grid[{i}]: must be a finite nonnegative number, got {v}"
                ));
                return None;
            }
        }
        for i in 1..grid.len() {
            if grid[i] <= grid[i - 1] {
                w.errors.push(format!(
                    "lambda_grid: must be strictly ascending, got {} after {}",
                    grid[i],
                    grid[i - 1]
                ));
                return None;
            }
        }
        Some(grid)
    });
    let a = w.get_f64("a");
    let b = w.get_f64("b");
    if let (Some(a), Some(b)) = (a, b) {
        if !(-2.0 < a && a < b && b < 2.0) {
            w.errors.push(format!(
                "a/b: interval [{a}, {b}] must satisfy -2 < a < b < 2 (outside (-2,2))"
            ));
        }
    }
    let delta = w.get_f64("delta").and_then(|v| {
        if v > 0.0 && v <= 1.0 {
            Some(v)
        } else {
            w.errors
                .push(format!("delta: must lie in (0, 1], got {v}"));
            None
        }
    });
    let grid = w.get_i64("grid").and_then(|v| {
        if v >= 64 {
            Some(v as usize)
        } else {
            w.errors
                .push(format!("grid: must be at least 64 points per axis, got {v}"));
            None
        }
    });
    let seeds = w.get_u64_array("seeds").and_then(|s| {
        if s.is_empty() {
            w.errors.push("seeds: must not be empty".into());
            None
        } else {
            Some(s)
        }
    });
    let seed = w.get_i64("seed").and_then(|v| {
        if v >= 0 {
            Some(v as u64)
        } else {
            w.errors.push(format!("seed: must be nonnegative, got {v}"));
            None
        }
    });
    let trials = w
        .get_i64("trials")
        .map(|v| {
            if v >= 1 {
                v as usize
            } else {
                w.errors.push(format!("trials: must be at least 1, got {v}"));
                DEFAULT_TRIALS
            }
        })
        .unwrap_or(DEFAULT_TRIALS);
    let bins = w
        .get_i64("bins")
        .map(|v| {
            if v >= 10 {
                v as usize
            } else {
                w.errors.push(format!("bins: must be at least 10, got {v}"));
                DEFAULT_BINS
            }
        })
        .unwrap_or(DEFAULT_BINS);
    let collar = w
        .get_i64("collar")
        .map(|v| {
            if v >= 0 {
                v
            } else {
                w.errors
                    .push(format!("collar: must be nonnegative, got {v}"));
                DEFAULT_COLLAR
            }
        })
        .unwrap_or(DEFAULT_COLLAR);
    let mass_cutoff = w
        .get_f64("mass_cutoff")
        .map(|v| {
            if v.is_finite() && v > 0.0 {
                v
            } else {
                w.errors
                    .push(format!("mass_cutoff: must be positive, got {v}"));
                DEFAULT_MASS_CUTOFF
            }
        })
        .unwrap_or(DEFAULT_MASS_CUTOFF);
    let energies = w.get_f64_array("energies").and_then(|e| {
        if e.is_empty() {
            w.errors.push("energies: must not be empty".into());
            None
        } else {
            Some(e)
        }
    });
    let windows = w.get_i64_array("windows").and_then(|ws| {
        if ws.is_empty() {
            w.errors.push("windows: must not be empty".into());
            return None;
        }
        for (i, &j) in ws.iter().enumerate() {
            if j < 1 {
                w.errors
                    .push(format!("windows[{i}]: must be at least 1, got {j}"));
                return None;
            }
        }
        Some(ws)
    });
    let ell = w
        .get_i64("ell")
        .map(|v| {
            if v >= 1 {
                v as u64
            } else {
                w.errors.push(format!("ell: must be at least 1, got {v}"));
                DEFAULT_ELL
            }
        })
        .unwrap_or(DEFAULT_ELL);
    let coupling_targets = w.get_f64_array("coupling_targets");

    let mut errors = w.errors;

    let distribution = match table.get("distribution") {
        None => None,
        Some(value) => {
            walk_distribution("distribution", value, &mut errors);
            match value.clone().try_into::<CouplingDistribution>() {
                Ok(d) => match d.validate() {
                    Ok(()) => Some(d),
                    Err(e) => {
                        errors.push(format!("distribution: {e}"));
                        None
                    }
                },
                Err(e) => {
                    errors.push(format!("distribution: {e}"));
                    None
                }
            }
        }
    };

    // Cross-field rules that need several fields at once.
    if let Some(e) = experiment {
        cross_checks(
            e,
            &CrossFields {
                nu,
                boundary,
                layout,
                base_scale,
                annuli,
                bump_radius,
                lambda,
                lambda_grid: lambda_grid.as_deref(),
                distribution: distribution.as_ref(),
                energies: energies.as_deref(),
                table,
            },
            &mut errors,
        );
    }

    if !errors.is_empty() {
        errors.sort();
        return Err(Error::Config(errors));
    }
    Ok(ExperimentConfig {
        experiment: experiment.expect("validated"),
        output_path: output_path.expect("validated"),
        format,
        nu,
        half_side,
        boundary,
        layout,
        base_scale,
        annuli,
        bump_radius,
        plateau_radius,
        distribution,
        lambda,
        lambda_grid,
        a,
        b,
        delta,
        grid,
        seeds,
        seed,
        trials,
        bins,
        collar,
        mass_cutoff,
        energies,
        windows,
        ell,
        coupling_targets,
    })
}

struct CrossFields<'a> {
    nu: Option<usize>,
    boundary: Boundary,
    layout: Layout,
    base_scale: Option<i64>,
    annuli: Option<usize>,
    bump_radius: Option<i64>,
    lambda: Option<f64>,
    lambda_grid: Option<&'a [f64]>,
    distribution: Option<&'a CouplingDistribution>,
    energies: Option<&'a [f64]>,
    table: &'a Table,
}

fn cross_checks(e: Experiment, f: &CrossFields, errors: &mut Vec<String>) {
    if e == Experiment::TorusLemma {
        if let Some(nu) = f.nu {
            if nu > 3 {
                errors.push(format!(
                    "nu: the exhaustive torus scan supports nu <= 3, got {nu}"
                ));
            }
        }
    }

    let has_potential = !matches!(
        e,
        Experiment::TorusLemma | Experiment::CommutatorIdentity | Experiment::HypothesisCheck
    );
    if has_potential {
        match f.layout {
            Layout::Annular => {
                if f.base_scale.is_none() && !f.table.contains_key("M") {
                    errors.push("M: required by the annular layout".into());
                }
                if f.annuli.is_none() && !f.table.contains_key("K") {
                    errors.push("K: required by the annular layout".into());
                }
                if f.table.contains_key("bump_radius") {
                    errors.push("bump_radius: only used by the single-bump layout".into());
                }
            }
            Layout::SingleBump => {
                if f.bump_radius.is_none() && !f.table.contains_key("bump_radius") {
                    errors.push("bump_radius: required by the single-bump layout".into());
                }
                for key in ["M", "K"] {
                    if f.table.contains_key(key) {
                        errors.push(format!("{key}: only used by the annular layout"));
                    }
                }
            }
            Layout::Stationary => {
                for key in ["M", "K", "bump_radius"] {
                    if f.table.contains_key(key) {
                        errors.push(format!(
                            "{key}: not used by the stationary layout"
                        ));
                    }
                }
            }
        }
    }

    if f.boundary == Boundary::Periodic {
        let free_spectrum = matches!(e, Experiment::Spectrum | Experiment::Dos)
            && f.lambda == Some(0.0);
        let no_box = e == Experiment::TorusLemma;
        if !(free_spectrum || no_box) {
            errors.push(
                "boundary: periodic boxes are only supported for spectrum/dos at lambda = 0"
                    .into(),
            );
        }
    }

    // The threshold regime needs lambda·E∞ < 1; reject configs that leave it.
    if matches!(
        e,
        Experiment::Lemma1 | Experiment::Mourre | Experiment::LambdaScan
    ) {
        if let Some(mu) = f.distribution {
            let e_infty = mu.e_infty();
            let mut check = |l: f64, label: String| {
                if l * e_infty >= 1.0 {
                    errors.push(format!(
                        "{label}: lambda {l} times the coupling bound {e_infty} must stay below 1"
                    ));
                }
            };
            if let Some(l) = f.lambda {
                check(l, "lambda".into());
            }
            if let Some(grid) = f.lambda_grid {
                for (i, &l) in grid.iter().enumerate() {
                    check(l, format!("lambda_grid[{i}]"));
                }
            }
        }
    }

    if e == Experiment::Weyl {
        if f.layout == Layout::Stationary {
            errors.push(
                "layout: plane-wave witnesses need a bump layout, not `stationary`".into(),
            );
        }
        if let (Some(nu), Some(energies)) = (f.nu, f.energies) {
            let band = 2.0 * nu as f64;
            for (i, &en) in energies.iter().enumerate() {
                if !(en.is_finite() && en.abs() < band) {
                    errors.push(format!(
                        "energies[{i}]: must lie strictly inside (-{band}, {band}), got {en}"
                    ));
                }
            }
        }
        let atomic = matches!(f.distribution, Some(CouplingDistribution::Atomic { .. }));
        if !atomic && !f.table.contains_key("coupling_targets") {
            errors.push(
                "coupling_targets: required unless the distribution is atomic".into(),
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_torus_config_gets_defaults() {
        let cfg = validate(
            r#"
experiment = "torus-lemma"
output_path = "out"
nu = 3
delta = 0.75
grid = 256
"#,
        )
        .unwrap();
        assert_eq!(cfg.experiment, Experiment::TorusLemma);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.boundary, Boundary::Dirichlet);
        assert_eq!(cfg.plateau_radius, 0.5);
        assert_eq!(cfg.collar, 5);
        assert_eq!(cfg.mass_cutoff, 0.01);
        assert_eq!(cfg.delta, Some(0.75));
        assert_eq!(cfg.grid, Some(256));
    }

    #[test]
    fn unknown_keys_are_fatal_and_itemized() {
        let err = validate(
            r#"
experiment = "torus-lemma"
output_path = "out"
nu = 3
delta = 0.75
grid = 256
gridd = 512
lambda = 0.5
"#,
        )
        .unwrap_err();
        let Error::Config(items) = err else {
            panic!("expected config error")
        };
        assert!(items.iter().any(|m| m.contains("gridd: unknown key")));
        assert!(items
            .iter()
            .any(|m| m.contains("lambda: not used by experiment `torus-lemma`")));
    }

    #[test]
    fn interval_outside_the_band_is_rejected() {
        let err = validate(
            r#"
experiment = "mourre"
output_path = "out"
nu = 1
L = 50
lambda = 0.1
a = -3.0
b = 0.0
seeds = [1]
M = 4
K = 1

[distribution]
kind = "uniform"
lo = -1.0
hi = 1.0
"#,
        )
        .unwrap_err();
        let Error::Config(items) = err else {
            panic!("expected config error")
        };
        assert!(items.iter().any(|m| m.contains("outside (-2,2)")), "{items:?}");
    }

    #[test]
    fn lambda_grid_breaking_the_coupling_budget_is_rejected() {
        let err = validate(
            r#"
experiment = "lambda-scan"
output_path = "out"
nu = 1
L = 50
lambda_grid = [0.0, 0.5, 1.0]
a = -0.5
b = 0.5
seeds = [1]
M = 4
K = 1

[distribution]
kind = "uniform"
lo = -1.0
hi = 1.0
"#,
        )
        .unwrap_err();
        let Error::Config(items) = err else {
            panic!("expected config error")
        };
        assert!(
            items
                .iter()
                .any(|m| m.contains("lambda_grid[2]") && m.contains("below 1")),
            "{items:?}"
        );
    }

    #[test]
    fn multiple_problems_reported_at_once() {
        let err = validate(
            r#"
experiment = "torus-lemma"
output_path = ""
nu = 9
delta = 1.5
grid = 8
"#,
        )
        .unwrap_err();
        let Error::Config(items) = err else {
            panic!("expected config error")
        };
        assert!(items.len() >= 4, "{items:?}");
        assert!(items.iter().any(|m| m.starts_with("nu:")));
        assert!(items.iter().any(|m| m.starts_with("delta:")));
        assert!(items.iter().any(|m| m.starts_with("grid:")));
        assert!(items.iter().any(|m| m.starts_with("output_path:")));
    }

    #[test]
    fn distribution_subtable_is_strict() {
        let err = validate(
            r#"
experiment = "spectrum"
output_path = "out"
nu = 1
L = 50
lambda = 0.1
seed = 1
M = 4
K = 1

[distribution]
kind = "uniform"
lo = -1.0
hi = 1.0
sigma = 2.0
"#,
        )
        .unwrap_err();
        let Error::Config(items) = err else {
            panic!("expected config error")
        };
        assert!(
            items.iter().any(|m| m.contains("distribution.sigma")),
            "{items:?}"
        );
    }

    #[test]
    fn layout_key_dependencies_are_enforced() {
        let err = validate(
            r#"
experiment = "spectrum"
output_path = "out"
nu = 1
L = 50
lambda = 0.1
seed = 1
layout = "stationary"
M = 4
K = 1

[distribution]
kind = "uniform"
lo = -1.0
hi = 1.0
"#,
        )
        .unwrap_err();
        let Error::Config(items) = err else {
            panic!("expected config error")
        };
        assert!(items.iter().any(|m| m.contains("M: not used")), "{items:?}");
        assert!(items.iter().any(|m| m.contains("K: not used")), "{items:?}");

        let ok = validate(
            r#"
experiment = "spectrum"
output_path = "out"
nu = 1
L = 50
lambda = 0.1
seed = 1
layout = "stationary"

[distribution]
kind = "uniform"
lo = -1.0
hi = 1.0
"#,
        );
        assert!(ok.is_ok(), "{ok:?}");
    }

    #[test]
    fn missing_required_keys_name_the_experiment() {
        let err = validate(
            r#"
experiment = "weyl"
output_path = "out"
"#,
        )
        .unwrap_err();
        let Error::Config(items) = err else {
            panic!("expected config error")
        };
        for key in ["nu", "L", "lambda", "energies", "windows", "seed"] {
            assert!(
                items
                    .iter()
                    .any(|m| m.starts_with(&format!("{key}:")) && m.contains("required")),
                "missing complaint for {key}: {items:?}"
            );
        }
    }

    #[test]
    fn mixture_children_are_validated_recursively() {
        let err = validate(
            r#"
experiment = "spectrum"
output_path = "out"
nu = 1
L = 50
lambda = 0.1
seed = 1
layout = "stationary"

[distribution]
kind = "mixture"
weights = [0.5, 0.5]

[[distribution.children]]
kind = "uniform"
lo = -1.0
hi = 1.0

[[distribution.children]]
kind = "atomic"
points = [0.0]
weights = [1.0]
typo = true
"#,
        )
        .unwrap_err();
        let Error::Config(items) = err else {
            panic!("expected config error")
        };
        assert!(
            items
                .iter()
                .any(|m| m.contains("distribution.children[1].typo")),
            "{items:?}"
        );
    }
}
