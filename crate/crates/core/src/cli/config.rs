//! Run configuration: a JSON file and command line flags merged into one
//! value. Flags win over the file.
//!
//! ```json
//! {
//!   "constraints": "-0.27:0.2,0:0.1,0.26:0.05",
//!   "family": "gaussian",
//!   "m": 3170,
//!   "grid": "-1:1:41",
//!   "seed": 7,
//!   "replications": 20000,
//!   "thetas": "25*0,25*-3",
//!   "out": "runs/snr"
//! }
//! ```
//!
//! `constraints` may also be a list of `{"theta": .., "q": ..}` objects, and
//! `grid` and `thetas` may be plain number lists. Relative paths in a config
//! file are resolved against the directory holding the file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Flags;
use crate::distributions::{LocationFamily, TabulatedCdf};
use crate::error::{Error, Result};
use crate::fdr_curve::{parse_constraints, Constraint, TargetCurve};
use crate::ingest::Mode;
use crate::simulation::linspace;

pub const SEED_ENV: &str = "FDRCURVE_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Test,
    Qstar,
    Simulate,
    SelectConstraints,
    Summarize,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Test => "test",
            Command::Qstar => "qstar",
            Command::Simulate => "simulate",
            Command::SelectConstraints => "select-constraints",
            Command::Summarize => "summarize",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstraintSpec {
    Text(String),
    List(Vec<Constraint>),
}

impl ConstraintSpec {
    pub fn constraints(&self) -> Result<Vec<Constraint>> {
        match self {
            ConstraintSpec::Text(s) => parse_constraints(s),
            ConstraintSpec::List(v) => Ok(v.clone()),
        }
    }
}

/// True locations: `count*value` or `value` items separated by commas, or
/// a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Text(String),
    List(Vec<f64>),
}

impl ThetaSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            ThetaSpec::List(v) => Ok(v.clone()),
            ThetaSpec::Text(s) => parse_thetas(s),
        }
    }
}

pub fn parse_thetas(s: &str) -> Result<Vec<f64>> {
    let bad = |item: &str| Error::Config(format!("invalid theta item `{item}`"));
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        let (count, value) = match item.split_once('*') {
            Some((c, v)) => (c.trim().parse::<usize>().map_err(|_| bad(item))?, v.trim()),
            None => (1, item),
        };
        let value: f64 = value.parse().map_err(|_| bad(item))?;
        if !value.is_finite() {
            return Err(bad(item));
        }
        out.extend(std::iter::repeat_n(value, count));
    }
    Ok(out)
}

/// Evaluation grid: `start:stop:count` or a list of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Text(String),
    List(Vec<f64>),
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        let points = match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Text(s) => parse_grid(s)?,
        };
        if points.is_empty() || points.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config(
                "grid must be a nonempty list of finite values".into(),
            ));
        }
        if points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("grid must be sorted".into()));
        }
        Ok(points)
    }
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("invalid grid `{s}` (expected start:stop:count)"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let count: usize = count.parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(bad());
    }
    Ok(linspace(start, stop, count))
}

/// `gaussian`, `gaussian:<scale>`, `logistic`, `tabulated:<csv>` or
/// `tabulated-monotone:<csv>`.
pub fn parse_family(spec: &str) -> Result<LocationFamily> {
    if let Some(path) = spec.strip_prefix("tabulated-monotone:") {
        return Ok(LocationFamily::tabulated(TabulatedCdf::from_csv(
            Path::new(path),
            true,
        )?));
    }
    if let Some(path) = spec.strip_prefix("tabulated:") {
        return Ok(LocationFamily::tabulated(TabulatedCdf::from_csv(
            Path::new(path),
            false,
        )?));
    }
    spec.parse()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Minimal,
    Greedy,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<ThetaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistics: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub flip_sign: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_rejections: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.matrix,
            &mut cfg.groups_file,
            &mut cfg.statistics,
            &mut cfg.scales,
            &mut cfg.out,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(f) = &cfg.family {
            for prefix in ["tabulated-monotone:", "tabulated:"] {
                if let Some(rest) = f.strip_prefix(prefix) {
                    if Path::new(rest).is_relative() {
                        cfg.family = Some(format!("{prefix}{}", base.join(rest).display()));
                    }
                    break;
                }
            }
        }
        Ok(cfg)
    }

    /// Merges an optional config file with flags; flags take precedence. The
    /// seed falls back to `FDRCURVE_SEED`, then 0.
    pub fn from_flags(command: Command, flags: Flags) -> Result<Self> {
        let mut cfg = match &flags.config {
            Some(path) => Self::from_json_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(c) = cfg.command {
            if c != command {
                return Err(Error::Config(format!(
                    "config file is for `{c}` but the command is `{command}`"
                )));
            }
        }
        cfg.command = Some(command);
        macro_rules! take {
            ($field:ident) => {
                if flags.$field.is_some() {
                    cfg.$field = flags.$field;
                }
            };
            ($field:ident, $wrap:expr) => {
                if let Some(v) = flags.$field {
                    cfg.$field = Some($wrap(v)?);
                }
            };
        }
        take!(constraints, |s| Ok::<_, Error>(ConstraintSpec::Text(s)));
        take!(family);
        take!(m);
        take!(grid, |s| Ok::<_, Error>(GridSpec::Text(s)));
        take!(seed);
        take!(replications);
        take!(thetas, |s| Ok::<_, Error>(ThetaSpec::Text(s)));
        take!(matrix);
        take!(groups);
        take!(groups_file);
        take!(statistics);
        take!(scales);
        take!(mode, |s: String| s.parse::<Mode>());
        take!(method, |s: String| parse_method(&s));
        take!(reference_rejections);
        take!(out);
        cfg.flip_sign |= flags.flip_sign;
        if cfg.seed.is_none() {
            cfg.seed = Some(seed_from_env()?);
        }
        Ok(cfg)
    }

    pub fn command(&self) -> Result<Command> {
        self.command
            .ok_or_else(|| Error::Config("no command given".into()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn curve(&self) -> Result<TargetCurve> {
        let spec = self
            .constraints
            .as_ref()
            .ok_or_else(|| Error::Config("--constraints is required".into()))?;
        TargetCurve::from_constraints(&spec.constraints()?)
    }

    /// SHA-256 of the canonical JSON form of the configuration, leaving out
    /// the output location.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.out = None;
        let json = serde_json::to_string(&canon).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

fn parse_method(s: &str) -> Result<Method> {
    match s.trim() {
        "minimal" => Ok(Method::Minimal),
        "greedy" => Ok(Method::Greedy),
        other => Err(Error::Config(format!(
            "unknown method `{other}` (expected minimal or greedy)"
        ))),
    }
}

fn seed_from_env() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}
