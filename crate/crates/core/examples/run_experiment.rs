//! Drive an experiment from config text, as the CLI does.

use spherical_maximal::experiments::{run, ExperimentConfig, ExperimentKind};

fn main() -> spherical_maximal::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::CollinearScan);
    cfg.apply_text(
        "# quick collinear sweep\n\
         delta = 2^-5..2^-9\n\
         samples = 200000\n\
         seed = 3\n",
    )?;
    cfg.out = std::env::temp_dir().join("sphmax-collinear");
    cfg.quiet = true;
    let out = run(&cfg)?;
    print!("{}", out.report.summary(&cfg));
    println!("wrote {}", out.out_dir.display());
    Ok(())
}
