//! Target FDR curves, the q* transform, dominance between constraints, and
//! selection of constraint subsets.

mod dominance;
mod qstar;
mod select;

pub use dominance::{dominates, touching_point, Dominance};
pub use qstar::{q_star, q_star_single, CurvePoint, QStarCurve};
pub use select::{select_constraints_greedy, select_constraints_minimal, MAX_EXHAUSTIVE};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on levels when deciding whether q* touches q.
pub const TOUCH_TOL: f64 = 1e-9;

/// Target FDR level `q` at location `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub theta: f64,
    #[serde(rename = "q")]
    pub level: f64,
}

impl Constraint {
    pub fn new(theta: f64, level: f64) -> Result<Self> {
        let c = Constraint { theta, level };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return Err(Error::domain(format!(
                "constraint location {} is not finite",
                self.theta
            )));
        }
        if !(self.level > 0.0 && self.level <= 1.0) {
            return Err(Error::domain(format!(
                "constraint level {} at {} must lie in (0, 1]",
                self.level, self.theta
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.theta, self.level)
    }
}

/// Parses `theta:q`.
impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (theta, level) = s
            .trim()
            .rsplit_once(':')
            .ok_or_else(|| Error::Config(format!("constraint `{s}` is not of the form theta:q")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("invalid number `{v}` in constraint `{s}`")))
        };
        Constraint::new(parse(theta)?, parse(level)?)
    }
}

/// Parses a comma-separated list `theta:q[,theta:q...]`.
pub fn parse_constraints(s: &str) -> Result<Vec<Constraint>> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// The right-continuous, non-increasing step function
/// `q(θ) = inf { q_j : θ_j ≤ θ }`, equal to 1 left of the first jump.
///
/// Stored normalized: locations strictly increasing, levels strictly
/// decreasing and below 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveFile", into = "CurveFile")]
pub struct TargetCurve {
    constraints: Vec<Constraint>,
}

#[derive(Serialize, Deserialize)]
struct CurveFile {
    constraints: Vec<Constraint>,
}

impl TryFrom<CurveFile> for TargetCurve {
    type Error = Error;

    fn try_from(file: CurveFile) -> Result<Self> {
        TargetCurve::from_constraints(&file.constraints)
    }
}

impl From<TargetCurve> for CurveFile {
    fn from(curve: TargetCurve) -> Self {
        CurveFile {
            constraints: curve.constraints,
        }
    }
}

impl TargetCurve {
    /// Normalizes a constraint list into a step curve. Level-1 constraints
    /// are vacuous and dropped; so is any constraint implied by one at a
    /// smaller or equal location with a lower or equal level.
    pub fn from_constraints(constraints: &[Constraint]) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::domain("constraint list is empty"));
        }
        for c in constraints {
            c.validate()?;
        }
        let mut sorted = constraints.to_vec();
        sorted.sort_by(|x, y| {
            x.theta
                .total_cmp(&y.theta)
                .then(x.level.total_cmp(&y.level))
        });
        let mut kept: Vec<Constraint> = Vec::with_capacity(sorted.len());
        let mut running = 1.0;
        for c in sorted {
            if c.level < running {
                running = c.level;
                kept.push(c);
            }
        }
        Ok(TargetCurve { constraints: kept })
    }

    /// The one-jump curve `q·1{θ ≥ t} + 1{θ < t}`; at `t = 0` this is the
    /// target controlled by standard BH at level `q`.
    pub fn single(theta: f64, level: f64) -> Result<Self> {
        Self::from_constraints(&[Constraint::new(theta, level)?])
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    /// True when every constraint was vacuous, i.e. `q ≡ 1`.
    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn jump_locations(&self) -> impl Iterator<Item = f64> + '_ {
        self.constraints.iter().map(|c| c.theta)
    }

    pub fn first_jump(&self) -> Option<f64> {
        self.constraints.first().map(|c| c.theta)
    }

    pub fn last_jump(&self) -> Option<f64> {
        self.constraints.last().map(|c| c.theta)
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        let k = self.constraints.partition_point(|c| c.theta <= theta);
        if k == 0 {
            1.0
        } else {
            self.constraints[k - 1].level
        }
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::DegenerateCurve)
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(theta: f64, level: f64) -> Constraint {
        Constraint::new(theta, level).unwrap()
    }

    #[test]
    fn bh_step() {
        let curve = TargetCurve::from_constraints(&[c(0.0, 0.1)]).unwrap();
        assert_eq!(curve.evaluate(-1e-12), 1.0);
        assert_eq!(curve.evaluate(0.0), 0.1);
        assert_eq!(curve.evaluate(7.0), 0.1);
    }

    #[test]
    fn three_step_curve() {
        let curve =
            TargetCurve::from_constraints(&[c(0.26, 0.05), c(-0.27, 0.2), c(0.0, 0.1)]).unwrap();
        assert_eq!(curve.len(), 3);
        assert_eq!(curve.evaluate(-0.3), 1.0);
        assert_eq!(curve.evaluate(-0.27), 0.2);
        assert_eq!(curve.evaluate(-0.01), 0.2);
        assert_eq!(curve.evaluate(0.0), 0.1);
        assert_eq!(curve.evaluate(0.26), 0.05);
    }

    #[test]
    fn redundant_and_vacuous_constraints_are_dropped() {
        let curve = TargetCurve::from_constraints(&[c(0.0, 0.1), c(1.0, 0.1)]).unwrap();
        assert_eq!(curve.constraints(), &[c(0.0, 0.1)]);
        let curve =
            TargetCurve::from_constraints(&[c(0.0, 0.1), c(0.0, 0.05), c(2.0, 1.0)]).unwrap();
        assert_eq!(curve.constraints(), &[c(0.0, 0.05)]);
        let curve = TargetCurve::from_constraints(&[c(-1.0, 1.0)]).unwrap();
        assert!(curve.is_empty());
        assert_eq!(curve.evaluate(5.0), 1.0);
    }

    #[test]
    fn invalid_constraints() {
        assert!(TargetCurve::from_constraints(&[]).is_err());
        assert!(Constraint::new(0.0, 0.0).is_err());
        assert!(Constraint::new(0.0, 1.2).is_err());
        assert!(Constraint::new(f64::NAN, 0.1).is_err());
        let bad = Constraint {
            theta: 0.0,
            level: -0.1,
        };
        assert!(TargetCurve::from_constraints(&[bad]).is_err());
    }

    #[test]
    fn parses_flag_grammar() {
        let cs = parse_constraints("-0.27:0.2, 0:0.1,0.26:0.05").unwrap();
        assert_eq!(cs, vec![c(-0.27, 0.2), c(0.0, 0.1), c(0.26, 0.05)]);
        assert!(parse_constraints("0.1").is_err());
        assert!(parse_constraints("a:0.1").is_err());
        assert!(parse_constraints("0:2").is_err());
    }

    #[test]
    fn json_schema() {
        let curve: TargetCurve = serde_json::from_str(
            r#"{"constraints":[{"theta":1.0,"q":0.05},{"theta":0.0,"q":0.1}]}"#,
        )
        .unwrap();
        assert_eq!(curve.constraints(), &[c(0.0, 0.1), c(1.0, 0.05)]);
        let text = serde_json::to_string(&curve).unwrap();
        assert_eq!(
            text,
            r#"{"constraints":[{"theta":0.0,"q":0.1},{"theta":1.0,"q":0.05}]}"#
        );
        assert!(serde_json::from_str::<TargetCurve>(r#"{"constraints":[]}"#).is_err());
    }
}
