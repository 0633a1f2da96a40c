use serde::Serialize;

use super::{Constraint, TargetCurve};
use crate::distributions::LocationFamily;
use crate::error::{Error, Result};

/// How constraint `c1` relates to `c2`: whether controlling the one-jump
/// curve at `c2` already controls the FDR at `c1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dominance {
    /// `q̄*_{θ2}(θ1) < q1`.
    StrictlyDominated,
    /// `q̄*_{θ2}(θ1) = q1`.
    WeaklyDominated,
    NotDominated,
}

impl Dominance {
    /// True for both weak and strict dominance.
    pub fn is_dominated(self) -> bool {
        !matches!(self, Dominance::NotDominated)
    }
}

fn shifts(c: &Constraint, family: &LocationFamily, m: usize) -> (f64, f64) {
    (
        c.theta + family.quantile_unchecked(c.level),
        c.theta + family.quantile_unchecked(c.level / m as f64),
    )
}

fn require_monotone(family: &LocationFamily) -> Result<()> {
    if family.has_monotone_ratio() {
        Ok(())
    } else {
        Err(Error::UnsupportedFamily(format!(
            "{family} without declared monotone ratio"
        )))
    }
}

/// Decides whether `c1` is implied by `c2` through the quantile-shift
/// characterization: dominated iff `F⁻¹(q1) + θ1 ≥ F⁻¹(q2) + θ2` and
/// `F⁻¹(q1/m) + θ1 ≥ F⁻¹(q2/m) + θ2`, strictly if either is strict.
pub fn dominates(
    c1: &Constraint,
    c2: &Constraint,
    family: &LocationFamily,
    m: usize,
) -> Result<Dominance> {
    require_monotone(family)?;
    if m == 0 {
        return Err(Error::domain("number of hypotheses m must be at least 1"));
    }
    for c in [c1, c2] {
        if !(c.level > 0.0 && c.level < 1.0) {
            return Err(Error::domain(format!(
                "dominance needs levels in (0, 1), got {}",
                c.level
            )));
        }
    }
    let (b1, a1) = shifts(c1, family, m);
    let (b2, a2) = shifts(c2, family, m);
    Ok(if b1 >= b2 && a1 >= a2 {
        if b1 > b2 || a1 > a2 {
            Dominance::StrictlyDominated
        } else {
            Dominance::WeaklyDominated
        }
    } else {
        Dominance::NotDominated
    })
}

/// A location where `q*` touches `q`: the jump point minimising
/// `S(θ) = 2θ + F⁻¹(q(θ)/m) + F⁻¹(q(θ))`, ties toward the smallest `θ`.
///
/// `S` is affine increasing on each constant piece of a step curve, so only
/// jump points need to be compared.
pub fn touching_point(curve: &TargetCurve, family: &LocationFamily, m: usize) -> Result<f64> {
    require_monotone(family)?;
    curve.require_nondegenerate()?;
    if m == 0 {
        return Err(Error::domain("number of hypotheses m must be at least 1"));
    }
    let mut best: Option<(f64, f64)> = None;
    for c in curve.constraints() {
        let (b, a) = shifts(c, family, m);
        let s = a + b;
        match best {
            Some((_, s_best)) if s >= s_best => {}
            _ => best = Some((c.theta, s)),
        }
    }
    Ok(best.expect("non-degenerate curve has a jump").0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{FamilySet, TabulatedCdf};
    use crate::fdr_curve::{q_star_single, QStarCurve};

    fn c(theta: f64, level: f64) -> Constraint {
        Constraint::new(theta, level).unwrap()
    }

    #[test]
    fn same_level_further_right_is_implied() {
        let g = LocationFamily::standard_gaussian();
        let d = dominates(&c(0.5, 0.1), &c(0.0, 0.1), &g, 100).unwrap();
        assert_eq!(d, Dominance::StrictlyDominated);
        assert!(d.is_dominated());
        assert_eq!(
            dominates(&c(0.0, 0.1), &c(0.5, 0.1), &g, 100).unwrap(),
            Dominance::NotDominated
        );
        assert_eq!(
            dominates(&c(0.2, 0.1), &c(0.2, 0.1), &g, 100).unwrap(),
            Dominance::WeaklyDominated
        );
    }

    #[test]
    fn agrees_with_single_jump_transform() {
        let g = LocationFamily::standard_gaussian();
        let (c1, c2) = (c(0.5, 0.1), c(0.0, 0.1));
        let v = q_star_single(c2.theta, c2.level, &g, 100, c1.theta).unwrap();
        assert!(v < c1.level);
    }

    #[test]
    fn rejects_unsupported_inputs() {
        let t = TabulatedCdf::new(&[(-1.0, 0.2), (1.0, 0.8)], false).unwrap();
        let fam = LocationFamily::tabulated(t);
        assert!(matches!(
            dominates(&c(0.0, 0.1), &c(1.0, 0.05), &fam, 10),
            Err(Error::UnsupportedFamily(_))
        ));
        let g = LocationFamily::standard_gaussian();
        assert!(dominates(&c(0.0, 1.0), &c(1.0, 0.05), &g, 10).is_err());
    }

    #[test]
    fn touching_point_single_and_dominated_pair() {
        let g = LocationFamily::standard_gaussian();
        let curve = TargetCurve::single(0.0, 0.1).unwrap();
        assert_eq!(touching_point(&curve, &g, 50).unwrap(), 0.0);

        // (1, 0.09) is strictly implied by (0, 0.1) for m = 20
        let curve = TargetCurve::from_constraints(&[c(0.0, 0.1), c(1.0, 0.09)]).unwrap();
        assert!(dominates(&c(1.0, 0.09), &c(0.0, 0.1), &g, 20)
            .unwrap()
            .is_dominated());
        let s = |t: f64, q: f64| 2.0 * t + g.quantile(q / 20.0).unwrap() + g.quantile(q).unwrap();
        assert!(s(0.0, 0.1) < s(1.0, 0.09));
        let star = touching_point(&curve, &g, 20).unwrap();
        assert_eq!(star, 0.0);
        let q = QStarCurve::new(&curve, &FamilySet::shared(g, 20).unwrap());
        assert!((q.evaluate(star) - curve.evaluate(star)).abs() < 1e-9);
    }

    #[test]
    fn degenerate_curve_has_no_touching_point() {
        let curve = TargetCurve::from_constraints(&[c(0.0, 1.0)]).unwrap();
        assert!(matches!(
            touching_point(&curve, &LocationFamily::standard_gaussian(), 5),
            Err(Error::DegenerateCurve)
        ));
    }
}
