//! Generate separated families and write them as plain text.

use spherical_maximal::configurations::{focusing_family, random_family, SphereFamily};

fn main() -> spherical_maximal::Result<()> {
    let fam = random_family(3, 1.0 / 16.0, 20, 7)?;
    println!("{} spheres, min separation {:.4}", fam.len(), fam.min_separation());
    let text = fam.to_text();
    println!("{}", text.lines().take(3).collect::<Vec<_>>().join("\n"));
    assert_eq!(SphereFamily::from_text(&text)?, fam);

    let focus = focusing_family(3, 1.0 / 32.0, 1.3, 1.0, None)?;
    println!("focusing family: {} spheres through (0, 0, 1.3)", focus.len());
    Ok(())
}
