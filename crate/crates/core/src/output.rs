//! CSV and JSON artifacts. Every number is written with 12 significant
//! digits so that identical runs produce identical bytes.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::fdr_curve::CurvePoint;
use crate::ingest::GeneSummary;
use crate::simulation::CurveEstimate;
use crate::testing::RejectionResult;

/// Formats `v` rounded to 12 significant digits, shortest form. Infinities
/// print as `inf`/`-inf`; NaN (a value that does not apply) as empty.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return String::new();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    let abs = rounded.abs();
    if (1e-5..1e15).contains(&abs) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// `theta,q,q_star`.
pub fn write_curve_csv<W: Write>(w: W, points: &[CurvePoint]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["theta", "q", "q_star"])?;
    for p in points {
        out.write_record([fmt_num(p.theta), fmt_num(p.q), fmt_num(p.q_star)])?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `index,x,normalized_pvalue,selected` with 1-based indices.
pub fn write_rejection_csv<W: Write>(
    w: W,
    statistics: &[f64],
    result: &RejectionResult,
) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["index", "x", "normalized_pvalue", "selected"])?;
    for (i, (&x, &p)) in statistics
        .iter()
        .zip(&result.normalized_pvalues)
        .enumerate()
    {
        out.write_record([
            (i + 1).to_string(),
            fmt_num(x),
            fmt_num(p),
            u8::from(result.is_selected(i)).to_string(),
        ])?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RejectionSummary {
    pub m: usize,
    pub rejections: usize,
    pub cutoff_rank: usize,
}

impl From<&RejectionResult> for RejectionSummary {
    fn from(r: &RejectionResult) -> Self {
        RejectionSummary {
            m: r.normalized_pvalues.len(),
            rejections: r.rejections(),
            cutoff_rank: r.cutoff_rank,
        }
    }
}

/// Lower-bound columns for one grid point, when they apply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerColumns {
    pub exact: f64,
    pub exponential: f64,
}

/// `theta,q,q_star,fdr_hat,std_err,lower_exact,lower_exp`; lower-bound
/// cells are empty where the bound does not apply.
pub fn write_estimate_csv<W: Write>(
    w: W,
    est: &CurveEstimate,
    lower: &[Option<LowerColumns>],
) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record([
        "theta",
        "q",
        "q_star",
        "fdr_hat",
        "std_err",
        "lower_exact",
        "lower_exp",
    ])?;
    for k in 0..est.grid.len() {
        let lb = lower.get(k).copied().flatten();
        out.write_record([
            fmt_num(est.grid[k]),
            fmt_num(est.q[k]),
            fmt_num(est.q_star[k]),
            fmt_num(est.fdr_hat[k]),
            fmt_num(est.std_err[k]),
            fmt_num(lb.map_or(f64::NAN, |l| l.exact)),
            fmt_num(lb.map_or(f64::NAN, |l| l.exponential)),
        ])?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `gene_id,x,sigma_hat`.
pub fn write_summary_csv<W: Write>(w: W, summary: &GeneSummary) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["gene_id", "x", "sigma_hat"])?;
    for ((id, &x), &s) in summary
        .gene_ids
        .iter()
        .zip(&summary.x)
        .zip(&summary.sigma_hat)
    {
        out.write_record([id.clone(), fmt_num(x), fmt_num(s)])?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(serde_json::Error::io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-1.5), "-1.5");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(0.263_351_176_268_408), "0.263351176268");
        assert_eq!(fmt_num(2.0e-9), "2e-9");
        assert_eq!(fmt_num(123_456_789.123_456_7), "123456789.123");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(f64::NAN), "");
        assert_eq!(fmt_num(-0.0), "0");
    }

    #[test]
    fn curve_csv_layout() {
        let mut buf = Vec::new();
        write_curve_csv(
            &mut buf,
            &[CurvePoint {
                theta: 0.0,
                q: 0.1,
                q_star: 0.1,
            }],
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "theta,q,q_star\n0,0.1,0.1\n"
        );
    }
}
