//! Rasterise an analytic field, save it, load it back and average it.

use spherical_maximal::maximal::{region_average, ScalarField, VoxelGrid};
use spherical_maximal::{Region, Sphere};

fn main() -> spherical_maximal::Result<()> {
    let ball = ScalarField::ball(vec![0.0, 0.0, 1.2], 0.3)?;
    let grid = VoxelGrid::rasterise(&ball, vec![-0.4, -0.4, 0.8], 0.02, vec![40, 40, 40])?;
    println!("integral {:.5} (exact {:.5})", grid.integral(), 4.0 / 3.0 * std::f64::consts::PI * 0.027);

    let path = std::env::temp_dir().join("sphmax_ball.vox");
    grid.save(&path)?;
    let back = VoxelGrid::load(&path)?;
    println!("round trip exact: {}", back == grid);

    let region = Region::annulus(Sphere::new(vec![0.0; 3], 1.2)?, 0.05)?;
    let exact = region_average(&ball, &region, 100_000, 1)?;
    let voxel = region_average(&ScalarField::Voxel(back), &region, 100_000, 1)?;
    println!("annulus average: analytic {:.5}, voxel {:.5} +- {:.1e}", exact.value, voxel.value, voxel.std_error);
    Ok(())
}
