//! Enemy triples tangent at the top of the first sphere: full annuli break
//! the tuple bound, polar caps respect it.

use spherical_maximal::configurations::{classify_tuple, enemy_cap_triple, TupleClass};
use spherical_maximal::volume::{mc_volume_clipped, predicted_tuple_bound};
use spherical_maximal::RegionKind;

fn main() -> spherical_maximal::Result<()> {
    for k in [8, 10, 12] {
        let delta = 2f64.powi(-k);
        let spec = enemy_cap_triple(delta, 0.125, 2.0, 17)?;
        let refs: Vec<_> = spec.spheres.iter().collect();
        let TupleClass::Bucket(sig) = classify_tuple(&refs, delta)? else {
            continue;
        };
        let bound = predicted_tuple_bound(3, delta, &sig.t_list(), &sig.theta_or_floor(delta))?;
        let cap = mc_volume_clipped(&spec.regions(delta, RegionKind::PolarCap)?, 400_000, 1)?;
        let ann = mc_volume_clipped(&spec.regions(delta, RegionKind::Annulus)?, 400_000, 1)?;
        println!(
            "delta 2^-{k} {}: cap/bound {:.3}, annulus/bound {:.1}",
            sig.label(),
            cap.value / bound.value,
            ann.value / bound.value
        );
    }
    Ok(())
}
