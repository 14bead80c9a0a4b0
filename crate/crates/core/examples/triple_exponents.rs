//! Enemy, collinear and generic triples: volume exponents over a delta sweep.

use spherical_maximal::configurations::{collinear_triple, enemy_triple, reference_generic_triple, TripleSpec};
use spherical_maximal::fit::fit_exponent;
use spherical_maximal::volume::mc_volume_clipped;
use spherical_maximal::RegionKind;

fn scan(name: &str, spec: &TripleSpec) -> spherical_maximal::Result<()> {
    let mut pts = Vec::new();
    for k in 5..=10 {
        let d = 2f64.powi(-k);
        let v = mc_volume_clipped(&spec.regions(d, RegionKind::Annulus)?, 1_000_000, k as u64)?;
        pts.push((d, v.value));
    }
    let fit = fit_exponent(&pts)?;
    println!(
        "{name:9} slope {:.3} +- {:.3} (expected {})",
        fit.slope,
        fit.std_error,
        spec.expected_exponent()
    );
    Ok(())
}

fn main() -> spherical_maximal::Result<()> {
    let enemy = enemy_triple(1.0 / 1024.0, 0.0, [-0.3, 0.4], [0.2, -0.6])?;
    println!("enemy certificate: {:?}", enemy.certificate);
    scan("enemy", &enemy)?;
    scan("collinear", &collinear_triple(0.5, 1.8, 0.8)?)?;
    scan("generic", &reference_generic_triple()?)?;
    Ok(())
}
