//! Clipped Monte Carlo against the cell-centre grid on a triple intersection.

use spherical_maximal::volume::{grid_volume, mc_volume_clipped, sampling_box};
use spherical_maximal::{Region, Sphere};

fn main() -> spherical_maximal::Result<()> {
    let delta = 1.0 / 32.0;
    let p = [0.3, -0.2, 1.1];
    let centres = [[0.0, 0.0, 0.0], [0.4, 0.1, -0.2], [-0.3, 0.35, 0.1]];
    let regions = centres
        .iter()
        .map(|c| {
            let r = c.iter().zip(&p).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            Region::annulus(Sphere::new(c.to_vec(), r)?, delta)
        })
        .collect::<spherical_maximal::Result<Vec<_>>>()?;

    let bbox = sampling_box(&regions)?;
    println!("sampling box volume {:.4e}", bbox.volume());
    let mc = mc_volume_clipped(&regions, 2_000_000, 5)?;
    let grid = grid_volume(&regions, delta / 4.0)?;
    println!("mc   {:.5e} +- {:.1e} ({} hits)", mc.value, mc.std_error, mc.hits);
    println!("grid {:.5e} +- {:.1e} ({} cells)", grid.value, grid.std_error, grid.samples);
    Ok(())
}
