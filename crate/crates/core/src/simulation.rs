//! Monte Carlo estimates of FDR curves under the generalized BH procedure.
//!
//! Each replication draws `X_i = θ_i + F_i⁻¹(U_i)` from its own ChaCha
//! stream (stream id = replication index, key from the master seed), so
//! results do not depend on how replications are scheduled across threads.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::distributions::{FamilySet, LocationFamily};
use crate::error::{Error, Result};
use crate::fdr_curve::{QStarCurve, TargetCurve};
use crate::testing::{bh_generalized, fdp_curve, HypothesisSet};

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub true_thetas: Vec<f64>,
    pub families: FamilySet,
    pub curve: TargetCurve,
    pub replications: usize,
    pub grid: Vec<f64>,
    pub seed: u64,
}

/// 41 equally spaced points from 1.5 below the first jump to 1.5 above the
/// last one.
pub fn default_grid(curve: &TargetCurve) -> Vec<f64> {
    let lo = curve.first_jump().unwrap_or(0.0) - 1.5;
    let hi = curve.last_jump().unwrap_or(0.0) + 1.5;
    linspace(lo, hi, 41)
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|k| {
                if k == n - 1 {
                    stop
                } else {
                    start + (stop - start) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::domain("replications must be at least 1"));
        }
        if self.true_thetas.is_empty() {
            return Err(Error::domain("no true locations given"));
        }
        if self.families.m() != self.true_thetas.len() {
            return Err(Error::domain(format!(
                "{} true locations but families for {} hypotheses",
                self.true_thetas.len(),
                self.families.m()
            )));
        }
        if self.true_thetas.iter().any(|t| !t.is_finite()) {
            return Err(Error::domain("true locations must be finite"));
        }
        if self.grid.is_empty() {
            return Err(Error::domain("evaluation grid is empty"));
        }
        if self.grid.iter().any(|t| t.is_nan()) || self.grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("evaluation grid must be sorted"));
        }
        self.curve.require_nondegenerate()
    }

    /// SHA-256 over a canonical text rendering of the configuration.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        let mut put = |label: &str, values: &mut dyn Iterator<Item = u64>| {
            h.update(label.as_bytes());
            for v in values {
                h.update(v.to_le_bytes());
            }
        };
        put("thetas", &mut self.true_thetas.iter().map(|t| t.to_bits()));
        put("grid", &mut self.grid.iter().map(|t| t.to_bits()));
        put(
            "curve",
            &mut self
                .curve
                .constraints()
                .iter()
                .flat_map(|c| [c.theta.to_bits(), c.level.to_bits()]),
        );
        put(
            "run",
            &mut [self.replications as u64, self.seed].into_iter(),
        );
        for i in 0..self.families.m() {
            if i > 0 && self.families.is_shared() {
                break;
            }
            h.update(self.families.get(i).to_string().as_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Per-point Monte Carlo summary of the FDR curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveEstimate {
    pub grid: Vec<f64>,
    pub q: Vec<f64>,
    pub q_star: Vec<f64>,
    /// Mean FDP per grid point.
    pub fdr_hat: Vec<f64>,
    pub std_err: Vec<f64>,
    /// Mean over replications of `sup_grid FDP(θ)/q*(θ)`.
    pub sup_ratio_mean: f64,
    pub sup_ratio_se: f64,
    /// Same supremum taken only over grid points with `q*(θ) < 1`.
    pub active_sup_ratio_mean: f64,
    pub active_sup_ratio_se: f64,
    pub replications: usize,
}

struct Replication {
    fdp: Vec<f64>,
    sup_ratio: f64,
    active_sup_ratio: f64,
}

fn run_replication(config: &SimulationConfig, q_star: &[f64], rep: u64) -> Result<Replication> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(rep);
    let statistics: Vec<f64> = config
        .true_thetas
        .iter()
        .enumerate()
        .map(|(i, &theta)| {
            let u: f64 = rng.sample(Open01);
            theta + config.families.get(i).quantile_unchecked(u)
        })
        .collect();
    let data = HypothesisSet::new(statistics, config.families.clone())?;
    let result = bh_generalized(&data, &config.curve)?;
    let fdp = fdp_curve(&result.selected, &config.true_thetas, &config.grid);
    let (mut sup_ratio, mut active_sup_ratio) = (0.0f64, 0.0f64);
    for (f, &q) in fdp.iter().zip(q_star) {
        sup_ratio = sup_ratio.max(f / q);
        if q < 1.0 {
            active_sup_ratio = active_sup_ratio.max(f / q);
        }
    }
    Ok(Replication {
        fdp,
        sup_ratio,
        active_sup_ratio,
    })
}

/// Sum by recursive halving; the result depends only on the input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        values.iter().sum()
    } else {
        let (l, r) = values.split_at(values.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}

/// Mean and standard error of the mean (0 for a single value).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Estimates `FDR(θ)` on the grid together with `E[sup FDP/q*]`.
pub fn simulate_fdr_curve(config: &SimulationConfig) -> Result<CurveEstimate> {
    config.validate()?;
    let qstar = QStarCurve::new(&config.curve, &config.families);
    let samples = qstar.sample(&config.grid);
    let q_star: Vec<f64> = samples.iter().map(|p| p.q_star).collect();

    let reps: Vec<Replication> = (0..config.replications as u64)
        .into_par_iter()
        .map(|rep| run_replication(config, &q_star, rep))
        .collect::<Result<_>>()?;

    let mut fdr_hat = Vec::with_capacity(config.grid.len());
    let mut std_err = Vec::with_capacity(config.grid.len());
    let mut column = vec![0.0; reps.len()];
    for k in 0..config.grid.len() {
        for (slot, rep) in column.iter_mut().zip(&reps) {
            *slot = rep.fdp[k];
        }
        let (mean, se) = mean_and_se(&column);
        fdr_hat.push(mean);
        std_err.push(se);
    }
    let ratios: Vec<f64> = reps.iter().map(|r| r.sup_ratio).collect();
    let (sup_ratio_mean, sup_ratio_se) = mean_and_se(&ratios);
    let active: Vec<f64> = reps.iter().map(|r| r.active_sup_ratio).collect();
    let (active_sup_ratio_mean, active_sup_ratio_se) = mean_and_se(&active);

    Ok(CurveEstimate {
        grid: config.grid.clone(),
        q: samples.iter().map(|p| p.q).collect(),
        q_star,
        fdr_hat,
        std_err,
        sup_ratio_mean,
        sup_ratio_se,
        active_sup_ratio_mean,
        active_sup_ratio_se,
        replications: config.replications,
    })
}

/// Monte Carlo estimate of `E[sup_grid FDP(θ)/q*(θ)]` and its standard
/// error.
///
/// Left of every true location all hypotheses are null, so `FDP = 1` there
/// whenever anything is rejected while `q* = 1`. When true locations sit in
/// that region the mean can exceed 1 even though `FDR(θ) ≤ q*(θ)` holds
/// pointwise; [`CurveEstimate::active_sup_ratio_mean`] leaves those points out.
pub fn sup_fdp_ratio_check(config: &SimulationConfig) -> Result<(f64, f64)> {
    let est = simulate_fdr_curve(config)?;
    Ok((est.sup_ratio_mean, est.sup_ratio_se))
}

/// Lower bounds on the worst-case FDR left of the first jump, attained in
/// the configuration `θ_1 = … = θ_m = θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBound {
    pub theta: f64,
    pub q_star: f64,
    /// `1 - (1 - q*(θ)/m)^m`.
    pub exact: f64,
    /// `1 - exp(-q*(θ))`, never above `exact`.
    pub exponential: f64,
}

/// `1 - (1 - q/m)^m` and `1 - e^{-q}`, computed without cancellation.
pub fn lower_bound_pair(q_star: f64, m: usize) -> (f64, f64) {
    let exact = -((m as f64) * (-q_star / m as f64).ln_1p()).exp_m1();
    let exponential = -(-q_star).exp_m1();
    (exact, exponential)
}

pub fn lower_bound_curve(
    curve: &TargetCurve,
    family: &LocationFamily,
    m: usize,
    grid: &[f64],
) -> Result<Vec<LowerBound>> {
    if !family.has_monotone_ratio() {
        return Err(Error::UnsupportedFamily(family.to_string()));
    }
    curve.require_nondegenerate()?;
    let first = curve.first_jump().expect("non-degenerate curve");
    if let Some(&bad) = grid.iter().find(|&&t| !(t < first)) {
        return Err(Error::domain(format!(
            "lower bound applies below the first jump {first}, got {bad}"
        )));
    }
    let qstar = QStarCurve::new(curve, &FamilySet::shared(family.clone(), m)?);
    Ok(grid
        .iter()
        .map(|&theta| {
            let q_star = qstar.evaluate(theta);
            let (exact, exponential) = lower_bound_pair(q_star, m);
            LowerBound {
                theta,
                q_star,
                exact,
                exponential,
            }
        })
        .collect())
}
