//! p-values, curve-normalized p-values, the BH step-up procedure and its
//! generalization to target curves, and false discovery proportions.
//!
//! Hypotheses are one-sided, `H_{i,θ}: θ_i ≥ θ`, with p-value
//! `P_{i,θ} = F_i(X_i - θ)`; discoveries come from small statistics.

use serde::Serialize;

use crate::distributions::{FamilySet, LocationFamily};
use crate::error::{Error, Result};
use crate::fdr_curve::TargetCurve;

/// Observed statistics `X_1..X_m` with their distribution functions.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisSet {
    statistics: Vec<f64>,
    families: FamilySet,
}

impl HypothesisSet {
    pub fn new(statistics: Vec<f64>, families: FamilySet) -> Result<Self> {
        if statistics.is_empty() {
            return Err(Error::domain("hypothesis set is empty"));
        }
        if families.m() != statistics.len() {
            return Err(Error::domain(format!(
                "{} statistics but families for {} hypotheses",
                statistics.len(),
                families.m()
            )));
        }
        if let Some(x) = statistics.iter().find(|x| x.is_nan()) {
            return Err(Error::domain(format!("statistic {x} is not a number")));
        }
        Ok(HypothesisSet {
            statistics,
            families,
        })
    }

    /// All hypotheses share `family`.
    pub fn shared(statistics: Vec<f64>, family: LocationFamily) -> Result<Self> {
        let m = statistics.len().max(1);
        Self::new(statistics, FamilySet::shared(family, m)?)
    }

    pub fn m(&self) -> usize {
        self.statistics.len()
    }

    pub fn statistics(&self) -> &[f64] {
        &self.statistics
    }

    pub fn families(&self) -> &FamilySet {
        &self.families
    }
}

/// Outcome of a step-up procedure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectionResult {
    /// Selected hypotheses, 0-based and increasing.
    pub selected: Vec<usize>,
    /// The values the step-up ran on: raw p-values for standard BH, the
    /// curve-normalized p-values for the generalized procedure.
    pub normalized_pvalues: Vec<f64>,
    /// `i*`, equal to the number of rejections.
    pub cutoff_rank: usize,
}

impl RejectionResult {
    pub fn rejections(&self) -> usize {
        self.selected.len()
    }

    pub fn is_selected(&self, i: usize) -> bool {
        self.selected.binary_search(&i).is_ok()
    }
}

/// `P_θ = F(x - θ)`.
pub fn p_value(x: f64, family: &LocationFamily, theta: f64) -> f64 {
    family.cdf(x - theta)
}

/// `P̄_i = max_j P_{i,θ_j} / q_j` over the jump points of the curve.
///
/// This is the supremum of `P_{i,θ}/q(θ)` over the region where `q < 1`;
/// within each constant piece the ratio is largest at the left end. The
/// level-1 region is left out: there `P_{i,θ} → 1` as `θ → -∞`, which
/// would floor every value at 1. Values above 1 are kept as computed.
pub fn normalized_p_values(data: &HypothesisSet, curve: &TargetCurve) -> Result<Vec<f64>> {
    curve.require_nondegenerate()?;
    let constraints = curve.constraints();
    Ok(data
        .statistics
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let family = data.families.get(i);
            constraints
                .iter()
                .map(|c| p_value(x, family, c.theta) / c.level)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

/// Step-up on arbitrary non-negative values: `i* = max{i : v_(i) ≤ i q / m}`
/// and every value `≤ v_(i*)` is selected.
fn step_up(values: Vec<f64>, q: f64) -> RejectionResult {
    let m = values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mf = m as f64;
    let cutoff_rank = (1..=m)
        .rev()
        .find(|&rank| values[order[rank - 1]] <= rank as f64 * q / mf)
        .unwrap_or(0);
    let mut selected: Vec<usize> = if cutoff_rank == 0 {
        Vec::new()
    } else {
        let threshold = values[order[cutoff_rank - 1]];
        (0..m).filter(|&i| values[i] <= threshold).collect()
    };
    selected.sort_unstable();
    RejectionResult {
        selected,
        normalized_pvalues: values,
        cutoff_rank,
    }
}

/// Standard Benjamini-Hochberg at level `q`, inclusive comparisons.
pub fn bh_standard(pvalues: &[f64], q: f64) -> Result<RejectionResult> {
    if pvalues.is_empty() {
        return Err(Error::domain("p-value list is empty"));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::domain(format!("level {q} outside (0, 1]")));
    }
    if let Some(p) = pvalues.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::domain(format!("p-value {p} outside [0, 1]")));
    }
    Ok(step_up(pvalues.to_vec(), q))
}

/// Generalized BH: standard BH at level 1 on the curve-normalized p-values.
/// Selects the largest `S` with `i ∈ S ⟺ P̄_i ≤ |S|/m`.
pub fn bh_generalized(data: &HypothesisSet, curve: &TargetCurve) -> Result<RejectionResult> {
    Ok(step_up(normalized_p_values(data, curve)?, 1.0))
}

/// `FDP(θ) = #{i ∈ S : θ_i ≥ θ} / max(1, |S|)` on each grid point.
pub fn fdp_curve(selected: &[usize], true_thetas: &[f64], grid: &[f64]) -> Vec<f64> {
    let denom = selected.len().max(1) as f64;
    let mut chosen: Vec<f64> = selected.iter().map(|&i| true_thetas[i]).collect();
    chosen.sort_by(f64::total_cmp);
    grid.iter()
        .map(|&theta| {
            let below = chosen.partition_point(|&t| t < theta);
            (chosen.len() - below) as f64 / denom
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{std_normal_cdf, std_normal_quantile};
    use crate::fdr_curve::Constraint;

    #[test]
    fn p_values() {
        let g = LocationFamily::standard_gaussian();
        assert_eq!(p_value(0.0, &g, 0.0), 0.5);
        assert!((p_value(-1.2815515655, &g, 0.0) - 0.1).abs() < 1e-9);
        let s = LocationFamily::scaled_gaussian(2.0).unwrap();
        assert!((p_value(0.0, &s, 1.0) - 0.308_537_538_725_987).abs() < 1e-12);
        assert!(p_value(0.0, &g, 1.0) < p_value(0.0, &g, 0.5));
    }

    #[test]
    fn bh_hand_example() {
        let r = bh_standard(&[0.01, 0.04, 0.06, 0.9], 0.1).unwrap();
        assert_eq!(r.selected, vec![0, 1, 2]);
        assert_eq!(r.cutoff_rank, 3);
    }

    #[test]
    fn bh_edge_cases() {
        assert!(bh_standard(&[1.0, 1.0, 1.0], 0.5)
            .unwrap()
            .selected
            .is_empty());
        let r = bh_standard(&[0.1], 0.1).unwrap();
        assert_eq!(r.selected, vec![0]);
        assert!(bh_standard(&[], 0.1).is_err());
        assert!(bh_standard(&[0.2], 0.0).is_err());
        assert!(bh_standard(&[1.2], 0.1).is_err());
    }

    #[test]
    fn bh_ties_at_cutoff() {
        let r = bh_standard(&[0.05, 0.05, 0.05, 0.5], 0.1).unwrap();
        assert_eq!(r.selected, vec![0, 1, 2]);
        assert_eq!(r.cutoff_rank, 3);
    }

    #[test]
    fn normalized_two_constraints() {
        let curve = TargetCurve::from_constraints(&[
            Constraint::new(0.0, 0.1).unwrap(),
            Constraint::new(1.0, 0.05).unwrap(),
        ])
        .unwrap();
        let data = HypothesisSet::shared(vec![-3.0], LocationFamily::standard_gaussian()).unwrap();
        let pbar = normalized_p_values(&data, &curve).unwrap();
        let expected = (std_normal_cdf(-3.0) / 0.1).max(std_normal_cdf(-4.0) / 0.05);
        assert_eq!(pbar[0], expected);
    }

    #[test]
    fn normalized_upper_limit() {
        let curve = TargetCurve::from_constraints(&[
            Constraint::new(0.0, 0.1).unwrap(),
            Constraint::new(1.0, 0.05).unwrap(),
        ])
        .unwrap();
        let data = HypothesisSet::shared(vec![60.0], LocationFamily::standard_gaussian()).unwrap();
        assert_eq!(normalized_p_values(&data, &curve).unwrap()[0], 1.0 / 0.05);
    }

    #[test]
    fn degenerate_curve_is_rejected() {
        let curve = TargetCurve::from_constraints(&[Constraint::new(0.0, 1.0).unwrap()]).unwrap();
        let data = HypothesisSet::shared(vec![0.0], LocationFamily::standard_gaussian()).unwrap();
        assert!(matches!(
            normalized_p_values(&data, &curve),
            Err(Error::DegenerateCurve)
        ));
    }

    #[test]
    fn generalized_single_hypothesis() {
        let curve = TargetCurve::single(0.0, 0.1).unwrap();
        let x = std_normal_quantile(0.05);
        let data = HypothesisSet::shared(vec![x], LocationFamily::standard_gaussian()).unwrap();
        let r = bh_generalized(&data, &curve).unwrap();
        assert!((r.normalized_pvalues[0] - 0.5).abs() < 1e-12);
        assert_eq!(r.selected, vec![0]);
    }

    #[test]
    fn fdp_counts() {
        assert_eq!(fdp_curve(&[], &[0.0, 1.0], &[-1.0, 0.0, 2.0]), vec![0.0; 3]);
        assert_eq!(fdp_curve(&[0, 1], &[0.5, -0.5], &[0.0]), vec![0.5]);
        assert_eq!(
            fdp_curve(&[0, 1], &[0.5, -0.5], &[-3.0, 0.5, 0.6]),
            vec![1.0, 0.5, 0.0]
        );
    }

    #[test]
    fn family_count_must_match() {
        let fams = FamilySet::shared(LocationFamily::standard_gaussian(), 3).unwrap();
        assert!(HypothesisSet::new(vec![0.0, 1.0], fams).is_err());
        assert!(HypothesisSet::shared(vec![], LocationFamily::standard_gaussian()).is_err());
    }
}
