//! Sector counts around sampled spheres of jittered-grid families.

use spherical_maximal::configurations::family::grid_capacity;
use spherical_maximal::configurations::{cardinality_audit, cardinality_scan, random_family};

fn main() -> spherical_maximal::Result<()> {
    for k in 4..=7 {
        let delta = 2f64.powi(-k);
        let fam = random_family(3, delta, grid_capacity(3, delta).unwrap(), 2)?;
        let s = cardinality_scan(&fam, 8, 3)?;
        println!(
            "delta 2^-{k}: #C {:5} K distance {:.3} angular {:.3} degenerate {:.3}",
            fam.len(),
            s.k_distance,
            s.k_angular,
            s.k_degenerate
        );
    }
    let fam = random_family(3, 1.0 / 32.0, 150, 4)?;
    let r = cardinality_audit(&fam, &[0, 1], 0.25, 0.5)?;
    println!("single audit: {r:?}");
    Ok(())
}
