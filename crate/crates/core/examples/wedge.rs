//! Parallelepiped volumes by the Gram determinant and by base times height.

use spherical_maximal::linalg::{orthonormalise, proj_orthocomplement, wedge_norm_routes};

fn main() -> spherical_maximal::Result<()> {
    let vs = vec![vec![1.0, 0.0, 0.0, 0.0], vec![1.0, 2.0, 0.0, 0.0], vec![0.3, -1.0, 0.5, 0.0]];
    let w = wedge_norm_routes(&vs);
    println!("gram {:.15} product {:.15} (exact 1.0)", w.gram, w.product);

    let nearly = vec![vec![1.0, 0.0, 0.0], vec![1.0, 1e-9, 0.0]];
    let w = wedge_norm_routes(&nearly);
    println!("nearly parallel: gram {:.3e} product {:.3e}", w.gram, w.product);

    let basis = orthonormalise(&vs[..2])?;
    let h = proj_orthocomplement(&basis, &vs[2])?;
    println!("height of the third vector: {h:?}");
    Ok(())
}
