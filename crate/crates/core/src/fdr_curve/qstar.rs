//! The transformed curve
//!
//! ```text
//! q*(θ) = inf_θ' sup_i sup_{a_i ≤ x-θ' ≤ b_i} q(θ') F_i(x-θ) / F_i(x-θ'),
//!     a_i = F_i⁻¹(q(θ')/m),  b_i = F_i⁻¹(q(θ')).
//! ```
//!
//! For a step curve the infimum over `θ'` is attained on the jump set: on a
//! constant piece both window endpoints move right with `θ'`, and the ratio
//! numerator `F_i(x - θ)` is increasing in `x`, so each piece is minimised at
//! its left end. The level-1 region contributes values `≥ 1`, which the cap
//! at 1 absorbs.

use serde::Serialize;

use super::{Constraint, TargetCurve};
use crate::distributions::{FamilyKind, FamilySet, LocationFamily};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Window {
    family: LocationFamily,
    monotone: bool,
    a: f64,
    b: f64,
}

#[derive(Debug, Clone)]
struct JumpTerm {
    theta: f64,
    level: f64,
    windows: Vec<Window>,
}

impl JumpTerm {
    fn new(c: &Constraint, families: &[LocationFamily], m: usize) -> Self {
        let windows = families
            .iter()
            .map(|f| Window {
                family: f.clone(),
                monotone: f.has_monotone_ratio(),
                a: f.quantile_unchecked(c.level / m as f64),
                b: f.quantile_unchecked(c.level),
            })
            .collect();
        JumpTerm {
            theta: c.theta,
            level: c.level,
            windows,
        }
    }

    /// Uncapped contribution of this jump point to the infimum.
    fn value(&self, theta: f64, m: usize) -> f64 {
        let shift = self.theta - theta;
        self.windows
            .iter()
            .map(|w| window_sup(w, self.level, m, shift, theta, self.theta))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn window_sup(w: &Window, level: f64, m: usize, shift: f64, theta: f64, theta_prime: f64) -> f64 {
    if shift == 0.0 {
        return level;
    }
    if w.monotone {
        // q·F(θ'+a-θ)/F(a) with F(a) = q/m, and q·F(θ'+b-θ)/F(b) with F(b) = q
        let left = m as f64 * w.family.cdf(w.a + shift);
        let right = w.family.cdf(w.b + shift);
        left.max(right)
    } else {
        // a and b are finite for 0 < level < 1
        match w.family.sup_ratio_scan(theta, theta_prime, w.a, w.b) {
            Ok(r) => level * r,
            Err(_) => f64::INFINITY,
        }
    }
}

/// Families entering the supremum over `i`. Among Gaussian scales the
/// window terms `Φ(z + (θ' - θ)/σ)` are monotone in `σ`, so only the
/// smallest and largest scale can attain the supremum.
fn envelope_families(families: &FamilySet) -> Vec<LocationFamily> {
    let distinct = families.distinct();
    let mut out = Vec::new();
    let mut scale_range: Option<(f64, f64)> = None;
    for f in distinct {
        match f.kind() {
            FamilyKind::StandardGaussian | FamilyKind::ScaledGaussian => {
                let s = f.scale().unwrap_or(1.0);
                scale_range = Some(match scale_range {
                    None => (s, s),
                    Some((lo, hi)) => (lo.min(s), hi.max(s)),
                });
            }
            _ => out.push(f),
        }
    }
    if let Some((lo, hi)) = scale_range {
        let gaussian = |s: f64| {
            if s == 1.0 {
                LocationFamily::standard_gaussian()
            } else {
                LocationFamily::scaled_gaussian(s).expect("scale validated on construction")
            }
        };
        out.insert(0, gaussian(lo));
        if hi != lo {
            out.insert(1, gaussian(hi));
        }
    }
    out
}

/// One row of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub theta: f64,
    pub q: f64,
    pub q_star: f64,
}

/// `q*` for a step target curve, precomputed for repeated evaluation.
#[derive(Debug, Clone)]
pub struct QStarCurve {
    curve: TargetCurve,
    m: usize,
    terms: Vec<JumpTerm>,
}

impl QStarCurve {
    pub fn new(curve: &TargetCurve, families: &FamilySet) -> Self {
        let m = families.m();
        let envelope = envelope_families(families);
        let terms = curve
            .constraints()
            .iter()
            .map(|c| JumpTerm::new(c, &envelope, m))
            .collect();
        QStarCurve {
            curve: curve.clone(),
            m,
            terms,
        }
    }

    pub fn curve(&self) -> &TargetCurve {
        &self.curve
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `q*(θ)` with the infimum over every jump point.
    pub fn evaluate(&self, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.value(theta, self.m))
            .fold(1.0, f64::min)
    }

    /// `q*_{Θ'}(θ)` with the infimum restricted to the jump points at the
    /// given indices into [`TargetCurve::constraints`].
    pub fn evaluate_subset(&self, theta: f64, subset: &[usize]) -> f64 {
        subset
            .iter()
            .map(|&j| self.terms[j].value(theta, self.m))
            .fold(1.0, f64::min)
    }

    /// The uncapped value contributed by jump point `j` at `θ`.
    pub fn jump_value(&self, j: usize, theta: f64) -> f64 {
        self.terms[j].value(theta, self.m)
    }

    /// Maps jump locations to indices, failing on any location not in the
    /// jump set of the curve.
    pub fn subset_indices(&self, locations: &[f64]) -> Result<Vec<usize>> {
        locations
            .iter()
            .map(|&loc| {
                self.terms
                    .iter()
                    .position(|t| t.theta == loc)
                    .ok_or_else(|| {
                        Error::domain(format!("{loc} is not a jump location of the target curve"))
                    })
            })
            .collect()
    }

    pub fn sample(&self, grid: &[f64]) -> Vec<CurvePoint> {
        grid.iter()
            .map(|&theta| CurvePoint {
                theta,
                q: self.curve.evaluate(theta),
                q_star: self.evaluate(theta),
            })
            .collect()
    }

    /// The step curve with level `q*(θ_j)` at each jump point `θ_j` of `q`.
    pub fn as_step_curve(&self) -> Result<TargetCurve> {
        let constraints: Vec<Constraint> = self
            .terms
            .iter()
            .map(|t| Constraint::new(t.theta, self.evaluate(t.theta)))
            .collect::<Result<_>>()?;
        if constraints.is_empty() {
            return Ok(self.curve.clone());
        }
        TargetCurve::from_constraints(&constraints)
    }
}

/// `q*(θ)` for a step curve, optionally restricted to a subset of its jump
/// locations.
pub fn q_star(
    curve: &TargetCurve,
    families: &FamilySet,
    theta: f64,
    subset: Option<&[f64]>,
) -> Result<f64> {
    let q = QStarCurve::new(curve, families);
    match subset {
        None => Ok(q.evaluate(theta)),
        Some(locations) => {
            let idx = q.subset_indices(locations)?;
            Ok(q.evaluate_subset(theta, &idx))
        }
    }
}

/// `q̄*_t(θ)` for the one-jump curve `level·1{θ ≥ t} + 1{θ < t}`:
/// `min(1, max(m F(t + F⁻¹(level/m) - θ), F(t + F⁻¹(level) - θ)))` for
/// families with the monotone ratio property, otherwise the capped scanned
/// supremum. Equals 1 everywhere when `level = 1`.
pub fn q_star_single(
    t: f64,
    level: f64,
    family: &LocationFamily,
    m: usize,
    theta: f64,
) -> Result<f64> {
    let c = Constraint::new(t, level)?;
    if m == 0 {
        return Err(Error::domain("number of hypotheses m must be at least 1"));
    }
    if level == 1.0 {
        return Ok(1.0);
    }
    let term = JumpTerm::new(&c, std::slice::from_ref(family), m);
    Ok(term.value(theta, m).min(1.0))
}
