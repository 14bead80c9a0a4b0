//! Growth of M^delta on the indicator of a delta-ball for p below, at and
//! above n/(n-1).

use spherical_maximal::maximal::focusing_probe;

fn main() -> spherical_maximal::Result<()> {
    let deltas: Vec<f64> = (5..=9).map(|k| 2f64.powi(-k)).collect();
    for p in [1.2, 1.5, 2.0] {
        let probe = focusing_probe(3, p, &deltas, 1)?;
        println!("p = {p}: growth {:.4} (predicted {:.4})", probe.growth, probe.predicted);
    }
    Ok(())
}
