//! The multiplicity functional on focusing and random families.

use spherical_maximal::configurations::{focusing_family, random_family};
use spherical_maximal::experiments::{predicted_rhs, RhsKind};
use spherical_maximal::maximal::{multiplicity_functional, tuple_sum_bruteforce};

fn main() -> spherical_maximal::Result<()> {
    for k in 4..=7 {
        let delta = 2f64.powi(-k);
        for (name, fam) in [
            ("focusing", focusing_family(3, delta, 1.3, 1.0, None)?),
            ("random", random_family(3, delta, 40, 1)?),
        ] {
            let m = multiplicity_functional(&fam, 500_000, 11)?;
            let rhs = predicted_rhs(RhsKind::Multiplicity, 3, 3, delta, &[], &[], fam.len())?;
            println!("delta 2^-{k} {name:8} #C {:4} ratio {:.3e}", fam.len(), m.value / rhs);
        }
    }
    let small = random_family(3, 0.125, 6, 9)?;
    let a = multiplicity_functional(&small, 500_000, 1)?;
    let b = tuple_sum_bruteforce(&small, 100_000, 2)?;
    println!("six spheres: pointwise {:.4e} +- {:.1e}, tuple sum {:.4e} +- {:.1e}", a.value, a.std_error, b.value, b.std_error);
    Ok(())
}
