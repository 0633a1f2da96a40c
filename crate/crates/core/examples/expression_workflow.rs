//! From an expression matrix to rejections, in both hypothesis modes.
//!
//! Writes a synthetic genes × samples table (log2 scale, four samples per
//! group, some genes raised in group B), summarises each gene, and tests
//! with effect-size and SNR hypotheses.
//!
//! ```bash
//! cargo run --example expression_workflow
//! ```

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fdrcurve::distributions::std_normal_quantile;
use fdrcurve::fdr_curve::parse_constraints;
use fdrcurve::ingest::{
    build_hypotheses, group_summary, load_matrix, parse_groups, GroupLabels, Mode,
};
use fdrcurve::{bh_generalized, TargetCurve};

fn write_matrix(path: &std::path::Path, genes: usize, raised: usize) -> std::io::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "gene\ta1\ta2\ta3\ta4\tb1\tb2\tb3\tb4")?;
    for g in 0..genes {
        let base = 6.0 + 4.0 * rng.gen::<f64>();
        let sd = 0.2 + 0.3 * rng.gen::<f64>();
        let shift = if g < raised { 1.0 } else { 0.0 };
        write!(f, "g{g:04}")?;
        for s in 0..8 {
            let z = std_normal_quantile(rng.gen_range(1e-12..1.0));
            let v = base + sd * z + if s >= 4 { shift } else { 0.0 };
            write!(f, "\t{v:.4}")?;
        }
        writeln!(f)?;
    }
    // a row the loader drops
    writeln!(f, "broken\t1\t2\tNA\t4\t5\t6\t7\t8")
}

pub fn run_example() -> fdrcurve::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| fdrcurve::Error::Data(e.to_string()))?;
    let path = dir.path().join("expr.tsv");
    write_matrix(&path, 400, 40).map_err(|e| fdrcurve::Error::Data(e.to_string()))?;

    let labels = GroupLabels::Inline(parse_groups("A,A,A,A,B,B,B,B")?);
    let (matrix, drops) = load_matrix(&path, &labels)?;
    let (summary, _) = group_summary(&matrix);
    println!(
        "{} genes kept, {} dropped, median sigma_hat {:.3}",
        summary.len(),
        drops.non_numeric,
        summary.median_sigma().unwrap_or(f64::NAN)
    );

    // rejections sit at small statistics, so raised-in-B genes need A - B
    let oriented = summary.negated();
    let median = oriented.median_sigma().unwrap_or(1.0);
    let effect = 0.25;
    for (mode, spec) in [
        (
            Mode::EffectSize,
            format!("{}:0.2,0:0.1,{}:0.05", -effect, effect),
        ),
        (
            Mode::Snr,
            format!("{}:0.2,0:0.1,{}:0.05", -effect / median, effect / median),
        ),
    ] {
        let curve = TargetCurve::from_constraints(&parse_constraints(&spec)?)?;
        let data = build_hypotheses(&oriented, mode)?;
        let result = bh_generalized(&data, &curve)?;
        let true_hits = result.selected.iter().filter(|&&i| i < 40).count();
        println!(
            "{mode:>11}: {} rejections, {} of them raised genes",
            result.rejections(),
            true_hits
        );
    }
    Ok(())
}

fn main() -> fdrcurve::Result<()> {
    run_example()
}
