use super::{QStarCurve, TargetCurve, TOUCH_TOL};
use crate::distributions::FamilySet;
use crate::error::{Error, Result};

/// Largest constraint count accepted by [`select_constraints_minimal`].
pub const MAX_EXHAUSTIVE: usize = 20;

fn controls_all(q: &QStarCurve, subset: &[usize]) -> bool {
    q.curve()
        .constraints()
        .iter()
        .all(|c| q.evaluate_subset(c.theta, subset) <= c.level + TOUCH_TOL)
}

/// Builds a controlling subset by induction over the jumps in increasing
/// `θ`: keep the first jump, then add each later jump only where the
/// current restricted `q*` exceeds its level.
///
/// Returns indices into [`TargetCurve::constraints`], in insertion order.
pub fn select_constraints_greedy(curve: &TargetCurve, families: &FamilySet) -> Result<Vec<usize>> {
    curve.require_nondegenerate()?;
    let q = QStarCurve::new(curve, families);
    let mut selected = vec![0];
    for (j, c) in curve.constraints().iter().enumerate().skip(1) {
        if q.evaluate_subset(c.theta, &selected) > c.level + TOUCH_TOL {
            selected.push(j);
        }
    }
    Ok(selected)
}

/// Exhaustive search for a smallest subset whose restricted `q*` stays
/// below every original constraint. Ties go to the lexicographically
/// smallest set of locations.
pub fn select_constraints_minimal(curve: &TargetCurve, families: &FamilySet) -> Result<Vec<usize>> {
    curve.require_nondegenerate()?;
    let n = curve.len();
    if n > MAX_EXHAUSTIVE {
        return Err(Error::TooManyConstraints {
            got: n,
            max: MAX_EXHAUSTIVE,
        });
    }
    let q = QStarCurve::new(curve, families);
    for size in 1..=n {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if controls_all(&q, &combo) {
                return Ok(combo);
            }
            if !next_combination(&mut combo, n) {
                break;
            }
        }
    }
    // the full set always controls every constraint
    unreachable!("full constraint set failed to control its own curve")
}

/// Advances to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
