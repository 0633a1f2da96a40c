//! Curve-normalized p-values and the generalized step-up procedure.
//!
//! With a one-jump target `q·1{θ ≥ 0} + 1{θ < 0}` the generalized procedure
//! is standard BH at level `q` on the p-values at `θ = 0`.
//!
//! ```bash
//! cargo run --example bh_reduction
//! ```

use fdrcurve::fdr_curve::parse_constraints;
use fdrcurve::testing::{normalized_p_values, p_value};
use fdrcurve::{bh_generalized, bh_standard, HypothesisSet, LocationFamily, TargetCurve};

pub fn run_example() -> fdrcurve::Result<()> {
    let gaussian = LocationFamily::standard_gaussian();
    let x = vec![-3.4, -2.9, -2.2, -1.1, -0.4, 0.3, 0.8, 1.9];
    let data = HypothesisSet::shared(x.clone(), gaussian.clone())?;

    let q_bh = TargetCurve::single(0.0, 0.1)?;
    let generalized = bh_generalized(&data, &q_bh)?;
    let p: Vec<f64> = x.iter().map(|&xi| p_value(xi, &gaussian, 0.0)).collect();
    let standard = bh_standard(&p, 0.1)?;
    assert_eq!(generalized.selected, standard.selected);
    println!(
        "one jump at 0, q = 0.1: {} rejections either way",
        standard.rejections()
    );

    // three constraints: looser to the left, stricter to the right
    let curve = TargetCurve::from_constraints(&parse_constraints("-0.5:0.2,0:0.1,0.5:0.05")?)?;
    let pbar = normalized_p_values(&data, &curve)?;
    let result = bh_generalized(&data, &curve)?;
    println!("{:>6} {:>12} {:>8}", "x", "P-bar", "selected");
    for (i, (xi, pb)) in x.iter().zip(&pbar).enumerate() {
        println!("{xi:>6.2} {pb:>12.6} {:>8}", result.is_selected(i));
    }
    println!("cutoff rank {}", result.cutoff_rank);
    Ok(())
}

fn main() -> fdrcurve::Result<()> {
    run_example()
}
