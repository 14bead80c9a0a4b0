//! Annulus and polar-cap membership, exact volumes and a Monte-Carlo check.

use spherical_maximal::volume::mc_volume;
use spherical_maximal::{Region, RegionKind, Sphere};

fn main() -> spherical_maximal::Result<()> {
    let s = Sphere::new(vec![0.0; 3], 1.0)?;
    let delta = 0.01;
    let ann = Region::annulus(s.clone(), delta)?;
    let cap = Region::new(s, delta, RegionKind::PolarCap)?;

    for y in [[0.0, 0.0, 1.005], [1.0, 0.0, 0.0], [0.0, 0.0, 1.02]] {
        println!("{y:?}: annulus {} cap {}", ann.contains(&y), cap.contains(&y));
    }
    println!("cap height above centre: {:.6}", cap.cap_height());

    for r in [&ann, &cap] {
        let est = mc_volume(std::slice::from_ref(r), &r.bounding_box(), 2_000_000, 1)?;
        println!(
            "{:?}: exact {:.6e}, mc {:.6e} +- {:.1e}",
            r.kind(),
            r.volume(),
            est.value,
            est.std_error
        );
    }
    Ok(())
}
