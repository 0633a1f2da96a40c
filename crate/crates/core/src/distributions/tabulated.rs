//! Distribution functions given by a table of `(x, F(x))` knots.
//!
//! Between knots the CDF is linear on the logit scale; beyond the first and
//! last knot the logit is extrapolated linearly with the slope of the
//! adjacent segment. The result is continuous, strictly increasing and
//! stays inside `(0, 1)` for every finite `x`.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    xs: Vec<f64>,
    logits: Vec<f64>,
    monotone_ratio: bool,
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn expit(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Deserialize)]
struct KnotRow {
    x: f64,
    probability: f64,
}

impl TabulatedCdf {
    /// Builds a table from knots. Needs at least two knots, strictly
    /// increasing in both coordinates, with probabilities inside `(0, 1)`.
    pub fn new(knots: &[(f64, f64)], monotone_ratio: bool) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::domain("tabulated family needs at least two knots"));
        }
        for &(x, p) in knots {
            if !x.is_finite() {
                return Err(Error::domain(format!("knot location {x} is not finite")));
            }
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::domain(format!(
                    "knot probability {p} must lie strictly inside (0, 1)"
                )));
            }
        }
        for pair in knots.windows(2) {
            if pair[1].0 <= pair[0].0 || pair[1].1 <= pair[0].1 {
                return Err(Error::domain(
                    "tabulated knots must be strictly increasing in x and probability",
                ));
            }
        }
        Ok(TabulatedCdf {
            xs: knots.iter().map(|k| k.0).collect(),
            logits: knots.iter().map(|k| logit(k.1)).collect(),
            monotone_ratio,
        })
    }

    /// Reads a two-column CSV with header `x,probability`.
    pub fn from_csv(path: &Path, monotone_ratio: bool) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(file);
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "probability" {
            return Err(Error::data(format!(
                "{}: expected header `x,probability`",
                path.display()
            )));
        }
        let mut knots = Vec::new();
        for row in reader.deserialize() {
            let row: KnotRow = row?;
            knots.push((row.x, row.probability));
        }
        Self::new(&knots, monotone_ratio)
            .map_err(|e| Error::data(format!("{}: {e}", path.display())))
    }

    pub fn monotone_ratio(&self) -> bool {
        self.monotone_ratio
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs
            .iter()
            .zip(&self.logits)
            .map(|(&x, &z)| (x, expit(z)))
    }

    fn logit_at(&self, x: f64) -> f64 {
        let n = self.xs.len();
        // segment index k such that the line through knots k, k+1 is used
        let k = match self.xs.partition_point(|&knot| knot <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let (z0, z1) = (self.logits[k], self.logits[k + 1]);
        z0 + (z1 - z0) * (x - x0) / (x1 - x0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::NEG_INFINITY {
            return 0.0;
        }
        if x == f64::INFINITY {
            return 1.0;
        }
        expit(self.logit_at(x))
    }

    /// Quantile by bisection on the CDF.
    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        let (mut lo, mut hi) = (self.xs[0], self.xs[self.xs.len() - 1]);
        let mut width = (hi - lo).max(1.0);
        while self.cdf(lo) > p {
            lo -= width;
            width *= 2.0;
        }
        width = (hi - lo).max(1.0);
        while self.cdf(hi) < p {
            hi += width;
            width *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}
