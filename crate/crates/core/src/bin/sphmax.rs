use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spherical_maximal::experiments::{parse_deltas, run, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(name = "sphmax", version, about = "Volume, bucket and maximal-operator experiments for spherical annuli")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enemy triple: tangent pairwise circles, volume ~ delta^(5/2).
    EnemyScan(Common),
    /// Collinear centres sharing a circle, volume ~ delta^2.
    CollinearScan(Common),
    /// Transversal triple, volume ~ delta^3.
    GenericScan(Common),
    /// Polar-cap tuple bound ratios on enemy triples.
    TupleBound(Common),
    /// Multiplicity functional against its log-corrected bound.
    Multiplicity(Common),
    /// Distance and angular sector counts.
    Cardinality(Common),
    /// Dyadic bucket partition and the coincident base case.
    BucketAudit(Common),
    /// Sliced L^{p_n} norm of the polar maximal operator.
    MaximalNorm(Common),
    /// Growth of M^delta on a small ball for several p.
    FocusingSweep(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    /// `2^-k` or decimal; repeat for a sweep, or give a range `2^-5..2^-9`.
    #[arg(long = "delta")]
    deltas: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
    /// Experiment parameter, `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Common) {
        match self {
            Command::EnemyScan(c) => (ExperimentKind::EnemyScan, c),
            Command::CollinearScan(c) => (ExperimentKind::CollinearScan, c),
            Command::GenericScan(c) => (ExperimentKind::GenericScan, c),
            Command::TupleBound(c) => (ExperimentKind::TupleBound, c),
            Command::Multiplicity(c) => (ExperimentKind::Multiplicity, c),
            Command::Cardinality(c) => (ExperimentKind::Cardinality, c),
            Command::BucketAudit(c) => (ExperimentKind::BucketAudit, c),
            Command::MaximalNorm(c) => (ExperimentKind::MaximalNorm, c),
            Command::FocusingSweep(c) => (ExperimentKind::FocusingSweep, c),
        }
    }
}

fn resolve(kind: ExperimentKind, c: Common) -> spherical_maximal::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(kind);
    if let Some(path) = &c.config {
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
    }
    if let Some(n) = c.dim {
        cfg.n = n;
    }
    if !c.deltas.is_empty() {
        let mut ds = Vec::new();
        for d in &c.deltas {
            ds.extend(parse_deltas(d)?);
        }
        cfg.deltas = ds;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(s) = c.samples {
        cfg.samples = s;
    }
    if let Some(o) = c.out {
        cfg.out = o;
    }
    cfg.quiet |= c.quiet;
    for kv in &c.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            spherical_maximal::Error::InvalidParameter(format!("--set expects key=value, got `{kv}`"))
        })?;
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let (kind, common) = Cli::parse().command.split();
    let cfg = match resolve(kind, common) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("sphmax: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(outcome) => {
            if !cfg.quiet {
                print!("{}", outcome.report.summary(&cfg));
            }
            eprintln!(
                "{}: {} ({})",
                kind,
                if outcome.passed() { "PASS" } else { "FAIL" },
                outcome.out_dir.display()
            );
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("sphmax: {e}");
            ExitCode::from(2)
        }
    }
}
