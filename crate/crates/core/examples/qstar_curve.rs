//! The transformed curve `q*` that the procedure actually controls.
//!
//! Prints `q` and `q*` on a grid for the three-constraint SNR curve with a
//! shared standard Gaussian and m = 3170, then checks that `q*` touches `q`
//! at every jump. The same curve under per-hypothesis scales (effect-size
//! style) is shown for comparison.
//!
//! ```bash
//! cargo run --example qstar_curve
//! ```

use fdrcurve::fdr_curve::{parse_constraints, touching_point, TOUCH_TOL};
use fdrcurve::simulation::linspace;
use fdrcurve::{FamilySet, LocationFamily, QStarCurve, TargetCurve};

pub fn run_example() -> fdrcurve::Result<()> {
    let m = 3170;
    let curve = TargetCurve::from_constraints(&parse_constraints("-0.27:0.2,0:0.1,0.26:0.05")?)?;
    let gaussian = LocationFamily::standard_gaussian();
    let shared = QStarCurve::new(&curve, &FamilySet::shared(gaussian.clone(), m)?);

    println!("{:>7} {:>6} {:>10}", "theta", "q", "q*");
    for p in shared.sample(&linspace(-0.6, 0.6, 13)) {
        println!("{:>7.2} {:>6.2} {:>10.6}", p.theta, p.q, p.q_star);
    }
    for c in curve.constraints() {
        let gap = (shared.evaluate(c.theta) - c.level).abs();
        assert!(gap <= TOUCH_TOL);
    }
    println!(
        "touches at every jump; S(theta) minimised at {}",
        touching_point(&curve, &gaussian, m)?
    );

    // scales spread around 0.27 as in a two-group expression comparison
    let scales: Vec<f64> = (0..m)
        .map(|i| 0.15 + 0.25 * i as f64 / (m - 1) as f64)
        .collect();
    let families = FamilySet::per_hypothesis(
        scales
            .iter()
            .map(|&s| LocationFamily::scaled_gaussian(s))
            .collect::<fdrcurve::Result<_>>()?,
    )?;
    let curve = TargetCurve::from_constraints(&parse_constraints("-0.07:0.2,0:0.1,0.07:0.05")?)?;
    let hetero = QStarCurve::new(&curve, &families);
    for c in curve.constraints() {
        println!(
            "theta {:>5}: q {:.2}  q* {:.6}",
            c.theta,
            c.level,
            hetero.evaluate(c.theta)
        );
    }
    Ok(())
}

fn main() -> fdrcurve::Result<()> {
    run_example()
}
