//! Dyadic buckets of ordered triples in a random family.

use spherical_maximal::configurations::{bucket_audit, random_family};

fn main() -> spherical_maximal::Result<()> {
    let fam = random_family(3, 1.0 / 32.0, 64, 1)?;
    let report = bucket_audit(&fam, 3)?;
    println!(
        "partition: {}; tuples classified: {}; coincident: {}; buckets: {}",
        if report.partition_ok() { "OK" } else { "FAILED" },
        report.classified,
        report.coincident,
        report.buckets.len()
    );
    let mut largest: Vec<_> = report.buckets.iter().collect();
    largest.sort_by_key(|(_, &c)| std::cmp::Reverse(c));
    for (sig, count) in largest.into_iter().take(5) {
        println!("  {:40} {count}", sig.label());
    }
    Ok(())
}
