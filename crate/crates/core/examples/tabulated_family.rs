//! A family given by a table of CDF knots.
//!
//! Without the monotone ratio property the inner supremum of the `q*`
//! transform is found numerically; declaring the property switches to the
//! endpoint rule.
//!
//! ```bash
//! cargo run --example tabulated_family
//! ```

use fdrcurve::distributions::TabulatedCdf;
use fdrcurve::fdr_curve::q_star_single;
use fdrcurve::LocationFamily;

pub fn run_example() -> fdrcurve::Result<()> {
    // knots taken from the standard Gaussian, plus a bumpy variant
    let smooth: Vec<(f64, f64)> = (-6..=6)
        .map(|k| {
            let x = k as f64 * 0.75;
            (x, fdrcurve::distributions::std_normal_cdf(x))
        })
        .collect();
    let bumpy = [
        (-3.0, 0.002),
        (-1.0, 0.05),
        (-0.8, 0.3),
        (0.5, 0.45),
        (1.5, 0.9),
        (3.0, 0.995),
    ];

    let declared = LocationFamily::tabulated(TabulatedCdf::new(&smooth, true)?);
    let scanned = LocationFamily::tabulated(TabulatedCdf::new(&smooth, false)?);
    let odd = LocationFamily::tabulated(TabulatedCdf::new(&bumpy, false)?);

    let (a, b) = (scanned.quantile(0.001)?, scanned.quantile(0.1)?);
    for theta in [-0.3, 0.3] {
        let endpoint = declared.sup_ratio(theta, 0.0, a, b)?;
        let scan = scanned.sup_ratio(theta, 0.0, a, b)?;
        println!("theta {theta:>4}: endpoint {endpoint:.9}  scan {scan:.9}");
    }
    for theta in [-0.5, -0.2, 0.0, 0.2] {
        println!(
            "q*_(0, 0.1)({theta:>4}) m=50: smooth {:.6}  bumpy {:.6}",
            q_star_single(0.0, 0.1, &declared, 50, theta)?,
            q_star_single(0.0, 0.1, &odd, 50, theta)?
        );
    }
    Ok(())
}

fn main() -> fdrcurve::Result<()> {
    run_example()
}
