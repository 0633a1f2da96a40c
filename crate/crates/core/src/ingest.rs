//! Expression matrices (genes × samples, log2 scale) and per-gene two-group
//! summaries for building hypothesis sets.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::distributions::{FamilySet, LocationFamily};
use crate::error::{Error, Result};
use crate::testing::HypothesisSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Group {
    A,
    B,
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Group::A),
            "B" | "b" => Ok(Group::B),
            other => Err(Error::Config(format!(
                "group label `{other}` is neither A nor B"
            ))),
        }
    }
}

/// Parses `A,A,B,B,...`.
pub fn parse_groups(s: &str) -> Result<Vec<Group>> {
    s.split(',').map(str::parse).collect()
}

/// Reads a two-column `sample_id,label` file (comma or tab). A first row
/// whose label is not A or B is taken as a header.
pub fn read_group_file(path: &Path) -> Result<Vec<(String, Group)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let delim = detect_delimiter(text.lines().next().unwrap_or(""));
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(delim as char).map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::data(format!(
                "{}:{}: expected two columns `sample_id,label`",
                path.display(),
                n + 1
            )));
        }
        match fields[1].parse::<Group>() {
            Ok(g) => out.push((fields[0].to_string(), g)),
            Err(_) if n == 0 => continue,
            Err(e) => return Err(Error::data(format!("{}:{}: {e}", path.display(), n + 1))),
        }
    }
    Ok(out)
}

/// Where the per-sample group labels come from.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupLabels {
    /// One label per sample column, in column order.
    Inline(Vec<Group>),
    /// Labels keyed by sample id.
    Keyed(Vec<(String, Group)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionMatrix {
    pub gene_ids: Vec<String>,
    pub sample_ids: Vec<String>,
    /// Row-major, one row per gene.
    pub values: Vec<Vec<f64>>,
    pub groups: Vec<Group>,
}

/// Rows discarded while loading or summarising, with reasons counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DropCounts {
    pub non_numeric: usize,
    pub zero_variance: usize,
}

fn detect_delimiter(header: &str) -> u8 {
    if header.matches('\t').count() > header.matches(',').count() {
        b'\t'
    } else {
        b','
    }
}

impl ExpressionMatrix {
    pub fn new(
        gene_ids: Vec<String>,
        sample_ids: Vec<String>,
        values: Vec<Vec<f64>>,
        groups: Vec<Group>,
    ) -> Result<Self> {
        if groups.len() != sample_ids.len() {
            return Err(Error::data(format!(
                "{} group labels for {} samples",
                groups.len(),
                sample_ids.len()
            )));
        }
        if gene_ids.len() != values.len() {
            return Err(Error::data("gene id count does not match row count"));
        }
        if let Some(row) = values.iter().position(|r| r.len() != sample_ids.len()) {
            return Err(Error::data(format!(
                "row for gene `{}` has {} values, expected {}",
                gene_ids[row],
                values[row].len(),
                sample_ids.len()
            )));
        }
        for g in [Group::A, Group::B] {
            let n = groups.iter().filter(|&&x| x == g).count();
            if n < 2 {
                return Err(Error::data(format!(
                    "group {g:?} has {n} samples; at least 2 per group are required"
                )));
            }
        }
        Ok(ExpressionMatrix {
            gene_ids,
            sample_ids,
            values,
            groups,
        })
    }

    pub fn n_genes(&self) -> usize {
        self.gene_ids.len()
    }
}

/// Loads a delimited matrix: header row of sample ids (first cell names the
/// gene column), then one row per gene. Comma or tab is detected from the
/// header. Rows with any non-numeric cell are dropped and counted.
pub fn load_matrix(path: &Path, labels: &GroupLabels) -> Result<(ExpressionMatrix, DropCounts)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::data(format!("{}: not valid UTF-8", path.display())))?;
    let header_line = text
        .lines()
        .next()
        .ok_or_else(|| Error::data(format!("{}: empty file", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(header_line))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header = reader.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::data(format!(
            "{}: header needs a gene column and at least one sample",
            path.display()
        )));
    }
    let sample_ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if sample_ids.iter().any(String::is_empty) {
        return Err(Error::data(format!(
            "{}: empty sample id in header",
            path.display()
        )));
    }

    let groups = match labels {
        GroupLabels::Inline(g) => g.clone(),
        GroupLabels::Keyed(pairs) => sample_ids
            .iter()
            .map(|id| {
                pairs
                    .iter()
                    .find(|(s, _)| s == id)
                    .map(|(_, g)| *g)
                    .ok_or_else(|| Error::data(format!("no group label for sample `{id}`")))
            })
            .collect::<Result<_>>()?,
    };

    let mut drops = DropCounts::default();
    let mut gene_ids = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::data(format!(
                "{}: line {} has {} fields, header has {}",
                path.display(),
                record.position().map_or(0, |p| p.line()),
                record.len(),
                header.len()
            )));
        }
        let row: Option<Vec<f64>> = record
            .iter()
            .skip(1)
            .map(|cell| cell.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();
        match row {
            Some(row) => {
                gene_ids.push(record[0].to_string());
                values.push(row);
            }
            None => drops.non_numeric += 1,
        }
    }
    if drops.non_numeric > 0 {
        warn!(
            "{}: dropped {} rows with non-numeric entries",
            path.display(),
            drops.non_numeric
        );
    }
    let matrix = ExpressionMatrix::new(gene_ids, sample_ids, values, groups)?;
    Ok((matrix, drops))
}

/// Per-gene difference of group means and its standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneSummary {
    pub gene_ids: Vec<String>,
    /// `mean(B) - mean(A)`.
    pub x: Vec<f64>,
    /// `sqrt(s²_A/n_A + s²_B/n_B)` with unbiased variances.
    pub sigma_hat: Vec<f64>,
}

impl GeneSummary {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Flips the orientation to `mean(A) - mean(B)`.
    pub fn negated(mut self) -> Self {
        for x in &mut self.x {
            *x = -*x;
        }
        self
    }

    pub fn median_sigma(&self) -> Option<f64> {
        if self.sigma_hat.is_empty() {
            return None;
        }
        let mut s = self.sigma_hat.clone();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        Some(if n % 2 == 1 {
            s[n / 2]
        } else {
            0.5 * (s[n / 2 - 1] + s[n / 2])
        })
    }
}

fn mean_var(values: impl Iterator<Item = f64> + Clone) -> (f64, f64, usize) {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, ss / (n as f64 - 1.0), n)
}

/// Summarises each gene; genes with zero variance in both groups are
/// dropped and counted.
pub fn group_summary(matrix: &ExpressionMatrix) -> (GeneSummary, usize) {
    let mut summary = GeneSummary {
        gene_ids: Vec::new(),
        x: Vec::new(),
        sigma_hat: Vec::new(),
    };
    let mut dropped = 0;
    for (id, row) in matrix.gene_ids.iter().zip(&matrix.values) {
        let pick = |g: Group| {
            row.iter()
                .zip(&matrix.groups)
                .filter(move |(_, &label)| label == g)
                .map(|(&v, _)| v)
        };
        let (mean_a, var_a, n_a) = mean_var(pick(Group::A));
        let (mean_b, var_b, n_b) = mean_var(pick(Group::B));
        let sigma = (var_a / n_a as f64 + var_b / n_b as f64).sqrt();
        if !(sigma > 0.0) {
            dropped += 1;
            continue;
        }
        summary.gene_ids.push(id.clone());
        summary.x.push(mean_b - mean_a);
        summary.sigma_hat.push(sigma);
    }
    if dropped > 0 {
        warn!("dropped {dropped} genes with zero variance in both groups");
    }
    (summary, dropped)
}

/// How per-gene summaries become hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Statistic `X_i`, family `Φ(x / σ̂_i)`: hypotheses on mean differences.
    EffectSize,
    /// Statistic `X_i / σ̂_i`, shared family `Φ`: hypotheses on `μ_i / σ_i`.
    Snr,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "effect-size" | "effect_size" => Ok(Mode::EffectSize),
            "snr" => Ok(Mode::Snr),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected effect-size or snr)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::EffectSize => "effect-size",
            Mode::Snr => "snr",
        })
    }
}

/// The family set a mode induces, without using the statistics.
pub fn mode_families(sigma_hat: &[f64], mode: Mode) -> Result<FamilySet> {
    match mode {
        Mode::EffectSize => FamilySet::per_hypothesis(
            sigma_hat
                .iter()
                .map(|&s| LocationFamily::scaled_gaussian(s))
                .collect::<Result<_>>()?,
        ),
        Mode::Snr => FamilySet::shared(LocationFamily::standard_gaussian(), sigma_hat.len()),
    }
}

pub fn build_hypotheses(summary: &GeneSummary, mode: Mode) -> Result<HypothesisSet> {
    if let Some(s) = summary.sigma_hat.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::domain(format!("sigma_hat {s} is not positive")));
    }
    let statistics = match mode {
        Mode::EffectSize => summary.x.clone(),
        Mode::Snr => summary
            .x
            .iter()
            .zip(&summary.sigma_hat)
            .map(|(x, s)| x / s)
            .collect(),
    };
    HypothesisSet::new(statistics, mode_families(&summary.sigma_hat, mode)?)
}
