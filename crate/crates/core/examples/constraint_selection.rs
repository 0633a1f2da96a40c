//! Which constraints need to be enforced, and which are implied by others.
//!
//! ```bash
//! cargo run --example constraint_selection
//! ```

use fdrcurve::fdr_curve::{
    dominates, parse_constraints, q_star_single, select_constraints_greedy,
    select_constraints_minimal,
};
use fdrcurve::{Constraint, FamilySet, LocationFamily, QStarCurve, TargetCurve};

pub fn run_example() -> fdrcurve::Result<()> {
    let gaussian = LocationFamily::standard_gaussian();
    let m = 100;

    let c1 = Constraint::new(0.5, 0.1)?;
    let c2 = Constraint::new(0.0, 0.1)?;
    println!("{c1} vs {c2}: {:?}", dominates(&c1, &c2, &gaussian, m)?);
    println!("{c2} vs {c1}: {:?}", dominates(&c2, &c1, &gaussian, m)?);
    // the same question through the single-jump transform
    let implied = q_star_single(c2.theta, c2.level, &gaussian, m, c1.theta)? <= c1.level;
    println!("q*_(0, 0.1)(0.5) <= 0.1: {implied}");

    let curve =
        TargetCurve::from_constraints(&parse_constraints("-0.2:0.2,0:0.1,0.4:0.09,1:0.02")?)?;
    let families = FamilySet::shared(gaussian, m)?;
    let greedy = select_constraints_greedy(&curve, &families)?;
    let minimal = select_constraints_minimal(&curve, &families)?;
    let show = |idx: &[usize]| {
        idx.iter()
            .map(|&j| curve.constraints()[j].to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!("greedy:  {}", show(&greedy));
    println!("minimal: {}", show(&minimal));

    let qstar = QStarCurve::new(&curve, &families);
    for c in curve.constraints() {
        println!(
            "theta {:>5}: q {:.2}  q*_selected {:.6}",
            c.theta,
            c.level,
            qstar.evaluate_subset(c.theta, &minimal)
        );
    }
    Ok(())
}

fn main() -> fdrcurve::Result<()> {
    run_example()
}
