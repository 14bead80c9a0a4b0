//! Closed-form tuple bounds and the right-hand sides used in ratio audits.

use spherical_maximal::experiments::{a_exponent, predicted_rhs, RhsKind};
use spherical_maximal::volume::predicted_tuple_bound;

fn main() -> spherical_maximal::Result<()> {
    let delta = 2f64.powi(-8);
    let b = predicted_tuple_bound(3, delta, &[0.25, 0.125], &[0.5])?;
    println!("delta^3 / (t2 t3 theta3) = {:.4e}", b.value);
    for (m, n) in [(2, 3), (3, 3), (3, 4), (4, 4)] {
        println!("a({m}, {n}) = {}", a_exponent(m, n));
    }
    let t = predicted_rhs(RhsKind::TupleSum, 3, 3, delta, &[0.25, 0.125], &[0.5], 100)?;
    let m = predicted_rhs(RhsKind::Multiplicity, 3, 3, 2f64.powi(-6), &[], &[], 256)?;
    println!("tuple-sum form {t:.4e}, multiplicity form {m:.1}");
    Ok(())
}
