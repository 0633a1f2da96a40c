//! Location families `F(x - θ)`: distribution functions, quantiles, and the
//! supremum of CDF ratios over a quantile window.

mod families;
mod normal;
mod search;
mod tabulated;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use families::FamilySet;
pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
pub use search::golden_section_max;
pub use tabulated::TabulatedCdf;

use crate::error::{Error, Result};

/// Which family a [`LocationFamily`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    StandardGaussian,
    ScaledGaussian,
    Logistic,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    StandardGaussian,
    ScaledGaussian(f64),
    Logistic,
    Tabulated(Arc<TabulatedCdf>),
}

/// A continuous, strictly increasing distribution function `F`; the
/// location model is `P_θ(X ≤ x) = F(x - θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationFamily(Repr);

impl LocationFamily {
    pub fn standard_gaussian() -> Self {
        LocationFamily(Repr::StandardGaussian)
    }

    /// Gaussian with standard deviation `scale`, i.e. `F(x) = Φ(x / scale)`.
    pub fn scaled_gaussian(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain(format!(
                "scale must be positive and finite, got {scale}"
            )));
        }
        Ok(LocationFamily(Repr::ScaledGaussian(scale)))
    }

    pub fn logistic() -> Self {
        LocationFamily(Repr::Logistic)
    }

    pub fn tabulated(table: TabulatedCdf) -> Self {
        LocationFamily(Repr::Tabulated(Arc::new(table)))
    }

    pub fn kind(&self) -> FamilyKind {
        match self.0 {
            Repr::StandardGaussian => FamilyKind::StandardGaussian,
            Repr::ScaledGaussian(_) => FamilyKind::ScaledGaussian,
            Repr::Logistic => FamilyKind::Logistic,
            Repr::Tabulated(_) => FamilyKind::Tabulated,
        }
    }

    pub fn scale(&self) -> Option<f64> {
        match self.0 {
            Repr::StandardGaussian => Some(1.0),
            Repr::ScaledGaussian(s) => Some(s),
            _ => None,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match &self.0 {
            Repr::StandardGaussian => std_normal_cdf(x),
            Repr::ScaledGaussian(s) => std_normal_cdf(x / s),
            Repr::Logistic => {
                if x >= 0.0 {
                    1.0 / (1.0 + (-x).exp())
                } else {
                    let e = x.exp();
                    e / (1.0 + e)
                }
            }
            Repr::Tabulated(t) => t.cdf(x),
        }
    }

    /// Generalized quantile `F⁻¹(p)`; `±∞` at `p ∈ {0, 1}`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("probability {p} outside [0, 1]")));
        }
        Ok(self.quantile_unchecked(p))
    }

    pub(crate) fn quantile_unchecked(&self, p: f64) -> f64 {
        match &self.0 {
            Repr::StandardGaussian => std_normal_quantile(p),
            Repr::ScaledGaussian(s) => s * std_normal_quantile(p),
            Repr::Logistic => {
                if p == 0.0 {
                    f64::NEG_INFINITY
                } else if p == 1.0 {
                    f64::INFINITY
                } else {
                    (p / (1.0 - p)).ln()
                }
            }
            Repr::Tabulated(t) => t.quantile(p),
        }
    }

    /// Whether `F(x - θ') / F(x - θ)` is monotone in `x` for every pair of
    /// locations, so interval suprema of the ratio sit at an endpoint.
    ///
    /// Holds for the Gaussian and logistic families (`f/F` is decreasing);
    /// a tabulated family only has it if declared at construction.
    pub fn has_monotone_ratio(&self) -> bool {
        match &self.0 {
            Repr::StandardGaussian | Repr::ScaledGaussian(_) | Repr::Logistic => true,
            Repr::Tabulated(t) => t.monotone_ratio(),
        }
    }

    /// `F(y + θ' - θ) / F(y)`, the ratio in the q* transform at `y = x - θ'`.
    fn ratio(&self, theta: f64, theta_prime: f64, y: f64) -> f64 {
        self.cdf(y + theta_prime - theta) / self.cdf(y)
    }

    /// `sup { F(x - θ) / F(x - θ') : a ≤ x - θ' ≤ b }`.
    ///
    /// `a` must be finite; `b` may be `+∞`, where the ratio tends to 1.
    /// Families with the monotone ratio property are evaluated at the two
    /// endpoints; others go through [`LocationFamily::sup_ratio_scan`].
    pub fn sup_ratio(&self, theta: f64, theta_prime: f64, a: f64, b: f64) -> Result<f64> {
        check_window(a, b)?;
        if theta == theta_prime {
            return Ok(1.0);
        }
        if self.has_monotone_ratio() {
            let left = self.ratio(theta, theta_prime, a);
            let right = if b == f64::INFINITY {
                1.0
            } else {
                self.ratio(theta, theta_prime, b)
            };
            let sup = left.max(right);
            if sup.is_nan() {
                return Err(Error::domain(format!(
                    "CDF ratio undefined: F underflows at window endpoint {a}"
                )));
            }
            Ok(sup)
        } else {
            self.sup_ratio_scan(theta, theta_prime, a, b)
        }
    }

    /// Numerical supremum of the CDF ratio: a 512-point uniform scan plus
    /// points clustered geometrically toward both endpoints, refined by golden-section search
    /// around the best scan point. Works for any family.
    pub fn sup_ratio_scan(&self, theta: f64, theta_prime: f64, a: f64, b: f64) -> Result<f64> {
        check_window(a, b)?;
        if theta == theta_prime {
            return Ok(1.0);
        }
        let upper = if b == f64::INFINITY {
            self.quantile_unchecked(1.0 - 1e-15).max(a)
        } else {
            b
        };
        let points = scan_points(a, upper, 512);
        let values: Vec<f64> = points
            .iter()
            .map(|&y| self.ratio(theta, theta_prime, y))
            .collect();
        let mut best = 0;
        for (k, v) in values.iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            if values[best].is_nan() || *v > values[best] {
                best = k;
            }
        }
        let mut sup = values[best];
        if sup.is_nan() {
            return Err(Error::domain(format!(
                "CDF ratio undefined on window [{a}, {b}]"
            )));
        }
        if points.len() > 2 {
            let lo = points[best.saturating_sub(1)];
            let hi = points[(best + 1).min(points.len() - 1)];
            if hi > lo {
                let (_, refined) = golden_section_max(
                    |y| {
                        let r = self.ratio(theta, theta_prime, y);
                        if r.is_nan() {
                            f64::NEG_INFINITY
                        } else {
                            r
                        }
                    },
                    lo,
                    hi,
                    1e-9,
                );
                sup = sup.max(refined);
            }
        }
        if b == f64::INFINITY {
            sup = sup.max(1.0);
        }
        Ok(sup)
    }
}

fn check_window(a: f64, b: f64) -> Result<()> {
    if a.is_nan() || b.is_nan() || !a.is_finite() || b == f64::NEG_INFINITY {
        return Err(Error::domain(format!(
            "window [{a}, {b}] needs a finite lower end and b finite or +inf"
        )));
    }
    if a > b {
        return Err(Error::domain(format!(
            "window lower end {a} exceeds upper end {b}"
        )));
    }
    Ok(())
}

/// Scan points on `[lo, hi]`: `n` equally spaced points plus `n / 2` points
/// spaced geometrically toward each end, down to `1e-12` of the width.
fn scan_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let width = hi - lo;
    let half = n / 2;
    let mut points = Vec::with_capacity(2 * n + 1);
    for k in 0..=n {
        points.push(lo + width * k as f64 / n as f64);
    }
    for k in 0..half {
        let d = width * 10f64.powf(-12.0 + 11.0 * k as f64 / half as f64);
        points.push(lo + d);
        points.push(hi - d);
    }
    points.retain(|p| p.is_finite() && *p >= lo && *p <= hi);
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

impl fmt::Display for LocationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::StandardGaussian => write!(f, "gaussian"),
            Repr::ScaledGaussian(s) => write!(f, "gaussian:{s}"),
            Repr::Logistic => write!(f, "logistic"),
            Repr::Tabulated(_) => write!(f, "tabulated"),
        }
    }
}

/// Parses `gaussian`, `normal`, `gaussian:<scale>` and `logistic`.
/// Tabulated families are loaded from a file with [`TabulatedCdf::from_csv`].
impl FromStr for LocationFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        match (name.to_ascii_lowercase().as_str(), arg) {
            ("gaussian" | "normal", None) => Ok(Self::standard_gaussian()),
            ("gaussian" | "normal", Some(scale)) => {
                let scale: f64 = scale
                    .parse()
                    .map_err(|_| Error::Config(format!("invalid gaussian scale `{scale}`")))?;
                Self::scaled_gaussian(scale)
            }
            ("logistic", None) => Ok(Self::logistic()),
            _ => Err(Error::Config(format!(
                "unknown family `{s}` (expected gaussian, gaussian:<scale>, logistic)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_center() {
        assert_eq!(LocationFamily::standard_gaussian().cdf(0.0), 0.5);
        assert_eq!(LocationFamily::scaled_gaussian(2.0).unwrap().cdf(0.0), 0.5);
    }

    #[test]
    fn quantile_sentinels_and_domain() {
        let g = LocationFamily::standard_gaussian();
        assert_eq!(g.quantile(1.0).unwrap(), f64::INFINITY);
        assert_eq!(g.quantile(0.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(g.quantile(0.5).unwrap(), 0.0);
        assert!(matches!(g.quantile(1.5), Err(Error::Domain(_))));
        assert!(matches!(g.quantile(-0.1), Err(Error::Domain(_))));
        assert!(g.quantile(f64::NAN).is_err());
        let l = LocationFamily::logistic();
        assert_eq!(l.quantile(1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn scaled_gaussian_composes_with_standard() {
        let s = LocationFamily::scaled_gaussian(2.5).unwrap();
        for &x in &[-7.0, -1.0, 0.3, 4.0] {
            assert_eq!(s.cdf(x), std_normal_cdf(x / 2.5));
        }
        assert!(LocationFamily::scaled_gaussian(0.0).is_err());
        assert!(LocationFamily::scaled_gaussian(-1.0).is_err());
    }

    #[test]
    fn monotone_ratio_flags() {
        assert!(LocationFamily::standard_gaussian().has_monotone_ratio());
        assert!(LocationFamily::logistic().has_monotone_ratio());
        let t = TabulatedCdf::new(&[(-1.0, 0.2), (1.0, 0.8)], false).unwrap();
        assert!(!LocationFamily::tabulated(t).has_monotone_ratio());
        let t = TabulatedCdf::new(&[(-1.0, 0.2), (1.0, 0.8)], true).unwrap();
        assert!(LocationFamily::tabulated(t).has_monotone_ratio());
    }

    #[test]
    fn logistic_hazard_ratio_is_decreasing() {
        // f/F = 1 - F for the logistic; check monotonicity on a grid
        let l = LocationFamily::logistic();
        let h = 1e-6;
        let mut prev = f64::INFINITY;
        for k in 0..=400 {
            let x = -20.0 + 0.1 * k as f64;
            let density = (l.cdf(x + h) - l.cdf(x - h)) / (2.0 * h);
            let hazard = density / l.cdf(x);
            assert!(hazard <= prev + 1e-9, "x={x}");
            assert!((hazard - (1.0 - l.cdf(x))).abs() < 1e-6);
            prev = hazard;
        }
    }

    #[test]
    fn sup_ratio_identity_and_errors() {
        let g = LocationFamily::standard_gaussian();
        assert_eq!(g.sup_ratio(0.4, 0.4, -3.0, 1.0).unwrap(), 1.0);
        assert!(g.sup_ratio(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(g.sup_ratio(0.0, 1.0, f64::NEG_INFINITY, 0.0).is_err());
    }

    #[test]
    fn sup_ratio_endpoints_for_gaussian() {
        let g = LocationFamily::standard_gaussian();
        let a = std_normal_quantile(0.001);
        let b = std_normal_quantile(0.1);
        let left = g.sup_ratio(-0.3, 0.0, a, b).unwrap();
        assert_eq!(left, std_normal_cdf(a + 0.3) / std_normal_cdf(a));
        let right = g.sup_ratio(0.3, 0.0, a, b).unwrap();
        assert_eq!(right, std_normal_cdf(b - 0.3) / std_normal_cdf(b));
        // the scan agrees and confirms the attained endpoint
        let scan_left = g.sup_ratio_scan(-0.3, 0.0, a, b).unwrap();
        let scan_right = g.sup_ratio_scan(0.3, 0.0, a, b).unwrap();
        assert!((scan_left / left - 1.0).abs() < 1e-12);
        assert!((scan_right / right - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_window_tends_to_one() {
        let g = LocationFamily::standard_gaussian();
        let a = std_normal_quantile(0.01);
        // θ > θ': the ratio increases toward 1
        assert_eq!(g.sup_ratio(0.5, 0.0, a, f64::INFINITY).unwrap(), 1.0);
        // θ < θ': the ratio is largest at the left end
        let v = g.sup_ratio(-0.5, 0.0, a, f64::INFINITY).unwrap();
        assert_eq!(v, std_normal_cdf(a + 0.5) / std_normal_cdf(a));
    }

    #[test]
    fn scan_handles_non_monotone_table() {
        // kinked logit: the ratio is not monotone, the scan must still find the sup
        let t = TabulatedCdf::new(
            &[
                (-3.0, 0.01),
                (-1.0, 0.05),
                (-0.5, 0.3),
                (0.5, 0.5),
                (2.0, 0.97),
            ],
            false,
        )
        .unwrap();
        let fam = LocationFamily::tabulated(t);
        let v = fam.sup_ratio(-0.4, 0.0, -2.0, 1.5).unwrap();
        // dense grid plus the kinks of numerator and denominator
        let knots = [-3.0, -1.0, -0.5, 0.5, 2.0];
        let mut ys: Vec<f64> = (0..=200_000)
            .map(|k| -2.0 + 3.5 * k as f64 / 200_000.0)
            .collect();
        ys.extend(knots);
        ys.extend(knots.map(|k| k - 0.4));
        let brute = ys
            .into_iter()
            .filter(|y| (-2.0..=1.5).contains(y))
            .map(|y| fam.cdf(y + 0.4) / fam.cdf(y))
            .fold(0.0, f64::max);
        assert!(v >= brute * (1.0 - 1e-9));
        assert!((v / brute - 1.0).abs() < 1e-6, "scan {v} brute {brute}");
    }

    #[test]
    fn parses_family_specs() {
        assert_eq!(
            "gaussian".parse::<LocationFamily>().unwrap(),
            LocationFamily::standard_gaussian()
        );
        assert_eq!(
            "normal:2".parse::<LocationFamily>().unwrap().scale(),
            Some(2.0)
        );
        assert_eq!(
            "logistic".parse::<LocationFamily>().unwrap().kind(),
            FamilyKind::Logistic
        );
        assert!("cauchy".parse::<LocationFamily>().is_err());
        assert!("gaussian:-1".parse::<LocationFamily>().is_err());
    }
}
