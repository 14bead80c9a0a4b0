//! Pointwise maximal averages and the sliced norm of a small ball.

use spherical_maximal::maximal::{eval_max, sliced_max_norm, MaxProbeConfig, MaxVariant, ScalarField};

fn main() -> spherical_maximal::Result<()> {
    let delta = 1.0 / 16.0;
    let cfg = MaxProbeConfig::new(3, delta, 1.5, 1)?;
    let f = ScalarField::ball(vec![0.0, 0.0, 1.3], delta)?;
    for x in [[0.0, 0.0, 0.0], [0.05, 0.0, 0.0], [0.3, 0.0, 0.0]] {
        let a = eval_max(&f, &x, &cfg, MaxVariant::Annulus)?;
        let c = eval_max(&f, &x, &cfg, MaxVariant::PolarCap)?;
        println!("{x:?}: annulus {:.4e} at r={:.4}, cap {:.4e} at r={:.4}", a.value, a.radius, c.value, c.radius);
    }
    let half = ScalarField::half_space(vec![0.0, 0.0, 1.0], 1.5)?;
    let m = eval_max(&half, &[0.0; 3], &cfg, MaxVariant::PolarCap)?;
    println!("half-space above 1.5: {:.3} at r={:.4}", m.value, m.radius);

    let g = sliced_max_norm(&f, &cfg)?;
    println!("sliced L^{} norm {:.4e} +- {:.1e} on {} points", g.p, g.value, g.std_error, g.points);
    Ok(())
}
