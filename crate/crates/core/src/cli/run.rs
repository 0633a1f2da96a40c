//! Executes a [`RunConfig`]: one function per subcommand.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{parse_family, Command, Method, RunConfig};
use crate::distributions::{FamilySet, LocationFamily};
use crate::error::{Error, Result};
use crate::fdr_curve::{
    select_constraints_greedy, select_constraints_minimal, Constraint, QStarCurve, TargetCurve,
};
use crate::ingest::{
    build_hypotheses, group_summary, load_matrix, mode_families, parse_groups, read_group_file,
    DropCounts, GeneSummary, GroupLabels, Mode,
};
use crate::output::{
    write_curve_csv, write_estimate_csv, write_json, write_rejection_csv, write_summary_csv,
    LowerColumns, RejectionSummary,
};
use crate::simulation::{default_grid, lower_bound_pair, simulate_fdr_curve, SimulationConfig};
use crate::testing::{bh_generalized, HypothesisSet};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_REPLICATIONS: usize = 1000;

/// What a run produced. `manifest` is also written to `manifest.json` when
/// an output directory is set.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub command: Command,
    pub written: Vec<PathBuf>,
    pub manifest: Value,
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let command = cfg.command()?;
    let mut sink = Sink::new(cfg.out.as_deref())?;
    let mut manifest = match command {
        Command::Test => run_test(cfg, &mut sink)?,
        Command::Qstar => run_qstar(cfg, &mut sink)?,
        Command::Simulate => run_simulate(cfg, &mut sink)?,
        Command::SelectConstraints => run_select(cfg, &mut sink)?,
        Command::Summarize => run_summarize(cfg, &mut sink)?,
    };
    let header = json!({
        "command": command.to_string(),
        "version": VERSION,
        "config_hash": cfg.hash(),
    });
    if let (Value::Object(m), Value::Object(h)) = (&mut manifest, header) {
        m.extend(h);
    }
    sink.aux("manifest.json", |w| write_json(w, &manifest))?;
    Ok(RunOutcome {
        command,
        written: sink.written,
        manifest,
    })
}

/// Output destination. The main artifact goes to stdout when no directory
/// is configured; auxiliary files are then skipped.
struct Sink {
    dir: Option<PathBuf>,
    written: Vec<PathBuf>,
}

impl Sink {
    fn new(dir: Option<&Path>) -> Result<Self> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        }
        Ok(Sink {
            dir: dir.map(Path::to_path_buf),
            written: Vec::new(),
        })
    }

    fn main<F>(&mut self, name: &str, write: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> Result<()>,
    {
        if self.dir.is_some() {
            return self.aux(name, write);
        }
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        write(&mut lock)?;
        lock.flush().map_err(|e| Error::io("<stdout>", e))
    }

    fn aux<F>(&mut self, name: &str, write: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> Result<()>,
    {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        write(&mut w)?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }
}

fn grid_for(cfg: &RunConfig, curve: &TargetCurve) -> Result<Vec<f64>> {
    match &cfg.grid {
        Some(g) => g.points(),
        None => Ok(default_grid(curve)),
    }
}

fn shared_family(cfg: &RunConfig) -> Result<LocationFamily> {
    match &cfg.family {
        Some(spec) => parse_family(spec),
        None => Ok(LocationFamily::standard_gaussian()),
    }
}

fn require_mode(cfg: &RunConfig, what: &str) -> Result<Mode> {
    cfg.mode
        .ok_or_else(|| Error::Config(format!("{what} needs --mode effect-size or --mode snr")))
}

fn group_labels(cfg: &RunConfig) -> Result<GroupLabels> {
    match (&cfg.groups, &cfg.groups_file) {
        (Some(g), None) => Ok(GroupLabels::Inline(parse_groups(g)?)),
        (None, Some(path)) => Ok(GroupLabels::Keyed(read_group_file(path)?)),
        (Some(_), Some(_)) => Err(Error::Config(
            "give group labels with either --groups or --groups-file, not both".into(),
        )),
        (None, None) => Err(Error::Config(
            "--matrix needs --groups or --groups-file".into(),
        )),
    }
}

/// Per-gene summaries from the matrix, `B - A` orientation.
fn matrix_summary(path: &Path, cfg: &RunConfig) -> Result<(GeneSummary, DropCounts)> {
    let (matrix, mut drops) = load_matrix(path, &group_labels(cfg)?)?;
    let (summary, zero_variance) = group_summary(&matrix);
    drops.zero_variance = zero_variance;
    if summary.is_empty() {
        return Err(Error::data(format!("{}: no usable genes", path.display())));
    }
    Ok((summary, drops))
}

#[derive(Debug, Deserialize)]
struct StatRow {
    #[serde(default)]
    gene_id: Option<String>,
    x: f64,
    #[serde(default)]
    sigma_hat: Option<f64>,
}

/// Reads a CSV with an `x` column and optional `gene_id` and `sigma_hat`
/// columns. Other columns are ignored.
/// Gene ids, statistics and the optional `sigma_hat` column.
type StatisticsColumns = (Vec<String>, Vec<f64>, Option<Vec<f64>>);

fn read_statistics(path: &Path) -> Result<StatisticsColumns> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader.headers()?.clone();
    if !headers.iter().any(|h| h == "x") {
        return Err(Error::data(format!("{}: no `x` column", path.display())));
    }
    let has_sigma = headers.iter().any(|h| h == "sigma_hat");
    let (mut ids, mut xs, mut sigmas) = (Vec::new(), Vec::new(), Vec::new());
    for (k, row) in reader.deserialize().enumerate() {
        let row: StatRow = row.map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
        ids.push(row.gene_id.unwrap_or_else(|| (k + 1).to_string()));
        xs.push(row.x);
        if has_sigma {
            sigmas.push(row.sigma_hat.ok_or_else(|| {
                Error::data(format!(
                    "{}: row {} has no sigma_hat",
                    path.display(),
                    k + 1
                ))
            })?);
        }
    }
    if xs.is_empty() {
        return Err(Error::data(format!("{}: no rows", path.display())));
    }
    if xs.iter().chain(&sigmas).any(|v| !v.is_finite()) {
        return Err(Error::data(format!("{}: non-finite value", path.display())));
    }
    Ok((ids, xs, has_sigma.then_some(sigmas)))
}

fn read_scales(path: &Path) -> Result<Vec<f64>> {
    match read_statistics_sigma(path)? {
        Some(s) => Ok(s),
        None => Err(Error::data(format!(
            "{}: no `sigma_hat` column",
            path.display()
        ))),
    }
}

fn read_statistics_sigma(path: &Path) -> Result<Option<Vec<f64>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader.headers()?.clone();
    let Some(col) = headers.iter().position(|h| h == "sigma_hat") else {
        return Ok(None);
    };
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let v: f64 = record
            .get(col)
            .and_then(|c| c.parse().ok())
            .filter(|v: &f64| v.is_finite() && *v > 0.0)
            .ok_or_else(|| {
                Error::data(format!(
                    "{}: sigma_hat must be a positive number on every row",
                    path.display()
                ))
            })?;
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::data(format!("{}: no rows", path.display())));
    }
    Ok(Some(out))
}

/// Families for `qstar` and `select-constraints`. Only scales are read from
/// data inputs, never statistics.
fn curve_families(cfg: &RunConfig) -> Result<(FamilySet, Value)> {
    let sources = [
        cfg.scales.is_some(),
        cfg.matrix.is_some(),
        cfg.statistics.is_some(),
    ];
    let sigma = match sources.iter().filter(|s| **s).count() {
        0 => None,
        1 => Some(if let Some(path) = &cfg.scales {
            read_scales(path)?
        } else if let Some(path) = &cfg.matrix {
            matrix_summary(path, cfg)?.0.sigma_hat
        } else {
            read_scales(cfg.statistics.as_ref().expect("counted above"))?
        }),
        _ => {
            return Err(Error::Config(
                "give at most one of --scales, --matrix, --statistics".into(),
            ))
        }
    };
    match sigma {
        Some(sigma) => {
            let mode = require_mode(cfg, "deriving families from scales")?;
            if cfg.m.is_some_and(|m| m != sigma.len()) {
                return Err(Error::Config(format!(
                    "--m {} conflicts with {} scales",
                    cfg.m.unwrap_or(0),
                    sigma.len()
                )));
            }
            let families = mode_families(&sigma, mode)?;
            Ok((
                families,
                json!({ "mode": mode.to_string(), "m": sigma.len() }),
            ))
        }
        None => {
            let m = cfg
                .m
                .ok_or_else(|| Error::Config("--m is required with a shared --family".into()))?;
            let family = shared_family(cfg)?;
            let info = json!({ "family": family.to_string(), "m": m });
            Ok((FamilySet::shared(family, m)?, info))
        }
    }
}

fn run_qstar(cfg: &RunConfig, sink: &mut Sink) -> Result<Value> {
    let curve = cfg.curve()?;
    let (families, info) = curve_families(cfg)?;
    let grid = grid_for(cfg, &curve)?;
    let points = QStarCurve::new(&curve, &families).sample(&grid);
    sink.main("curve.csv", |w| write_curve_csv(w, &points))?;
    Ok(json!({ "families": info, "grid_points": grid.len() }))
}

#[derive(Debug, Serialize)]
struct JumpRow {
    theta: f64,
    q: f64,
    /// `q*` with the infimum over every jump point.
    q_star: f64,
    /// `q*` restricted to the selected jump points.
    q_star_selected: f64,
    selected: bool,
}

#[derive(Debug, Serialize)]
struct Selection {
    method: Method,
    m: usize,
    selected: Vec<Constraint>,
    jumps: Vec<JumpRow>,
}

fn run_select(cfg: &RunConfig, sink: &mut Sink) -> Result<Value> {
    let curve = cfg.curve()?;
    let (families, info) = curve_families(cfg)?;
    let method = cfg.method.clone().unwrap_or(Method::Minimal);
    let chosen = match method {
        Method::Minimal => select_constraints_minimal(&curve, &families)?,
        Method::Greedy => select_constraints_greedy(&curve, &families)?,
    };
    let qstar = QStarCurve::new(&curve, &families);
    let jumps = curve
        .constraints()
        .iter()
        .enumerate()
        .map(|(j, c)| JumpRow {
            theta: c.theta,
            q: c.level,
            q_star: qstar.evaluate(c.theta),
            q_star_selected: qstar.evaluate_subset(c.theta, &chosen),
            selected: chosen.contains(&j),
        })
        .collect();
    let selection = Selection {
        method,
        m: families.m(),
        selected: chosen.iter().map(|&j| curve.constraints()[j]).collect(),
        jumps,
    };
    sink.main("selection.json", |w| write_json(w, &selection))?;
    Ok(json!({ "families": info, "selected": selection.selected.len() }))
}

/// Hypotheses for `test`, plus manifest details.
fn test_hypotheses(cfg: &RunConfig) -> Result<(HypothesisSet, Value)> {
    match (&cfg.matrix, &cfg.statistics) {
        (Some(path), None) => {
            let mode = require_mode(cfg, "--matrix")?;
            let (summary, drops) = matrix_summary(path, cfg)?;
            let (hyps, orientation) = oriented_hypotheses(summary, mode, cfg.flip_sign)?;
            Ok((
                hyps,
                json!({ "mode": mode.to_string(), "orientation": orientation, "dropped": drops }),
            ))
        }
        (None, Some(path)) => {
            let (gene_ids, x, sigma) = read_statistics(path)?;
            match (cfg.mode, sigma) {
                (Some(mode), Some(sigma_hat)) => {
                    let summary = GeneSummary {
                        gene_ids,
                        x,
                        sigma_hat,
                    };
                    let (hyps, orientation) = oriented_hypotheses(summary, mode, cfg.flip_sign)?;
                    Ok((
                        hyps,
                        json!({ "mode": mode.to_string(), "orientation": orientation }),
                    ))
                }
                (Some(_), None) => Err(Error::Config(
                    "--mode needs a sigma_hat column in the statistics file".into(),
                )),
                (None, _) => {
                    let family = shared_family(cfg)?;
                    let x = if cfg.flip_sign {
                        x.iter().map(|v| -v).collect()
                    } else {
                        x
                    };
                    let info = json!({
                        "family": family.to_string(),
                        "orientation": if cfg.flip_sign { "-x" } else { "x" },
                    });
                    Ok((HypothesisSet::shared(x, family)?, info))
                }
            }
        }
        _ => Err(Error::Config(
            "`test` needs exactly one of --matrix or --statistics".into(),
        )),
    }
}

/// By default the statistic is `A - B`, so genes higher in group B land on
/// the rejection side; `flip_sign` keeps `B - A`.
fn oriented_hypotheses(
    summary: GeneSummary,
    mode: Mode,
    flip_sign: bool,
) -> Result<(HypothesisSet, &'static str)> {
    let (summary, orientation) = if flip_sign {
        (summary, "B-A")
    } else {
        (summary.negated(), "A-B")
    };
    Ok((build_hypotheses(&summary, mode)?, orientation))
}

fn run_test(cfg: &RunConfig, sink: &mut Sink) -> Result<Value> {
    let curve = cfg.curve()?;
    let (hyps, info) = test_hypotheses(cfg)?;
    let result = bh_generalized(&hyps, &curve)?;
    let grid = grid_for(cfg, &curve)?;
    let points = QStarCurve::new(&curve, hyps.families()).sample(&grid);
    let summary = RejectionSummary::from(&result);

    sink.main("rejections.csv", |w| {
        write_rejection_csv(w, hyps.statistics(), &result)
    })?;
    sink.aux("rejections.json", |w| write_json(w, &summary))?;
    sink.aux("curve.csv", |w| write_curve_csv(w, &points))?;
    if sink.dir.is_none() {
        eprintln!(
            "{} of {} hypotheses rejected",
            summary.rejections, summary.m
        );
    }

    let discrepancy = cfg
        .reference_rejections
        .map(|r| summary.rejections as i64 - r as i64);
    Ok(json!({
        "input": info,
        "m": summary.m,
        "rejections": summary.rejections,
        "cutoff_rank": summary.cutoff_rank,
        "reference_rejections": cfg.reference_rejections,
        "discrepancy": discrepancy,
    }))
}

fn run_simulate(cfg: &RunConfig, sink: &mut Sink) -> Result<Value> {
    let curve = cfg.curve()?;
    let thetas = cfg
        .thetas
        .as_ref()
        .ok_or_else(|| Error::Config("`simulate` needs --thetas".into()))?
        .values()?;
    let m = thetas.len();
    if cfg.m.is_some_and(|v| v != m) {
        return Err(Error::Config(format!(
            "--m {} conflicts with {m} true locations",
            cfg.m.unwrap_or(0)
        )));
    }
    let families = match &cfg.scales {
        Some(path) => {
            let sigma = read_scales(path)?;
            if sigma.len() != m {
                return Err(Error::Config(format!(
                    "{} scales for {m} true locations",
                    sigma.len()
                )));
            }
            mode_families(&sigma, require_mode(cfg, "--scales")?)?
        }
        None => FamilySet::shared(shared_family(cfg)?, m)?,
    };
    let sim = SimulationConfig {
        grid: grid_for(cfg, &curve)?,
        true_thetas: thetas,
        families,
        curve,
        replications: cfg.replications.unwrap_or(DEFAULT_REPLICATIONS),
        seed: cfg.seed(),
    };
    let est = simulate_fdr_curve(&sim)?;

    // the bound applies left of the first jump for a shared family with the
    // monotone ratio property
    let first = sim.curve.first_jump().unwrap_or(f64::INFINITY);
    let bound_applies = sim.families.is_shared() && sim.families.all_monotone_ratio();
    let lower: Vec<Option<LowerColumns>> = est
        .grid
        .iter()
        .zip(&est.q_star)
        .map(|(&theta, &qs)| {
            (bound_applies && theta < first).then(|| {
                let (exact, exponential) = lower_bound_pair(qs, m);
                LowerColumns { exact, exponential }
            })
        })
        .collect();
    sink.main("estimate.csv", |w| write_estimate_csv(w, &est, &lower))?;

    Ok(json!({
        "seed": sim.seed,
        "replications": sim.replications,
        "m": m,
        "simulation_fingerprint": sim.fingerprint(),
        "sup_ratio_mean": est.sup_ratio_mean,
        "sup_ratio_se": est.sup_ratio_se,
        "active_sup_ratio_mean": est.active_sup_ratio_mean,
        "active_sup_ratio_se": est.active_sup_ratio_se,
    }))
}

fn run_summarize(cfg: &RunConfig, sink: &mut Sink) -> Result<Value> {
    let path = cfg
        .matrix
        .as_ref()
        .ok_or_else(|| Error::Config("`summarize` needs --matrix".into()))?;
    let (summary, drops) = matrix_summary(path, cfg)?;
    let (summary, orientation) = if cfg.flip_sign {
        (summary.negated(), "A-B")
    } else {
        (summary, "B-A")
    };
    sink.main("summary.csv", |w| write_summary_csv(w, &summary))?;
    Ok(json!({
        "genes": summary.len(),
        "orientation": orientation,
        "dropped": drops,
        "median_sigma_hat": summary.median_sigma(),
    }))
}
