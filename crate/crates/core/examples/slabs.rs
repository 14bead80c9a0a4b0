//! The slab containing a pairwise annulus intersection, checked by sampling.

use spherical_maximal::geometry::slab_of_pair;
use spherical_maximal::rng::substream;
use spherical_maximal::volume::sampling_box;
use spherical_maximal::{Region, Sphere};

fn main() -> spherical_maximal::Result<()> {
    let delta = 1.0 / 32.0;
    let a = Sphere::new(vec![0.0, 0.0, 0.0], 1.2)?;
    let b = Sphere::new(vec![0.4, 0.1, 0.0], 1.5)?;
    let slab = slab_of_pair(&a, &b, delta)?;
    println!(
        "normal {:?} offset {:.6} half-thickness {:.6}",
        slab.normal(),
        slab.offset(),
        slab.half_thickness()
    );

    let regions = [Region::annulus(a, delta)?, Region::annulus(b, delta)?];
    let bbox = sampling_box(&regions)?;
    let mut rng = substream(3, &[]);
    let mut y = [0.0; 3];
    let (mut inside, mut outside_slab) = (0, 0);
    for _ in 0..1_000_000 {
        bbox.sample_into(&mut rng, &mut y);
        if regions.iter().all(|r| r.contains(&y)) {
            inside += 1;
            outside_slab += !slab.contains(&y) as u32;
        }
    }
    println!("{inside} points in both annuli, {outside_slab} outside the slab");
    Ok(())
}
