//! Monte Carlo estimate of the FDR curve, checked against `q*` from above
//! and the closed-form bound from below.
//!
//! ```bash
//! cargo run --release --example monte_carlo_bounds
//! ```

use fdrcurve::simulation::{default_grid, lower_bound_curve, simulate_fdr_curve, SimulationConfig};
use fdrcurve::{FamilySet, LocationFamily, TargetCurve};

pub fn run_example() -> fdrcurve::Result<()> {
    let gaussian = LocationFamily::standard_gaussian();
    let curve = TargetCurve::single(0.0, 0.1)?;

    // half nulls at the boundary, half strong signals
    let mut thetas = vec![0.0; 25];
    thetas.extend(std::iter::repeat_n(-3.0, 25));
    let config = SimulationConfig {
        families: FamilySet::shared(gaussian.clone(), thetas.len())?,
        grid: default_grid(&curve),
        true_thetas: thetas,
        curve: curve.clone(),
        replications: 4000,
        seed: 20_240_601,
    };
    let est = simulate_fdr_curve(&config)?;
    println!("{:>6} {:>8} {:>8} {:>8}", "theta", "q*", "FDR", "SE");
    for k in (0..est.grid.len()).step_by(5) {
        println!(
            "{:>6.2} {:>8.5} {:>8.5} {:>8.5}",
            est.grid[k], est.q_star[k], est.fdr_hat[k], est.std_err[k]
        );
        assert!(est.fdr_hat[k] <= est.q_star[k] + 3.0 * est.std_err[k]);
    }
    println!(
        "E[sup FDP/q*] = {:.4} +- {:.4}  (q* < 1 only: {:.4} +- {:.4})",
        est.sup_ratio_mean, est.sup_ratio_se, est.active_sup_ratio_mean, est.active_sup_ratio_se
    );

    // every theta_i at the same point left of the jump
    let theta = -0.3;
    let m = 50;
    let bound = lower_bound_curve(&curve, &gaussian, m, &[theta])?[0];
    let worst = SimulationConfig {
        true_thetas: vec![theta; m],
        families: FamilySet::shared(gaussian, m)?,
        grid: vec![theta],
        curve,
        replications: 4000,
        seed: 7,
    };
    let est = simulate_fdr_curve(&worst)?;
    println!(
        "theta = {theta}: 1-e^-q* = {:.5} <= 1-(1-q*/m)^m = {:.5} <= FDR = {:.5} (SE {:.5}) <= q* = {:.5}",
        bound.exponential, bound.exact, est.fdr_hat[0], est.std_err[0], bound.q_star
    );
    Ok(())
}

fn main() -> fdrcurve::Result<()> {
    run_example()
}
