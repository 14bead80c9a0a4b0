//! δ-sweeps, exponent fits and ratio audits behind the `sphmax` CLI.
//!
//! Every run writes `<out>/raw.csv`, `<out>/summary.txt` and
//! `<out>/config.echo`. The CSV carries no timings, so a rerun with the same
//! configuration reproduces it byte for byte.

mod config;
mod rhs;
mod runners;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub use config::{parse_config_text, parse_delta, parse_deltas, ExperimentConfig, ExperimentKind, MIN_SAMPLES};
pub use rhs::{a_exponent, predicted_rhs, RhsKind};

pub use crate::fit::{fit_exponent, FitResult};
use crate::error::Result;

/// An asserted invariant and whether it held.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub kind: ExperimentKind,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Named summary fields, in insertion order.
    pub fields: Vec<(String, String)>,
    /// Every seed handed to a generator or estimator, by role.
    pub seeds: Vec<(String, u64)>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(kind: ExperimentKind, header: &[&str]) -> Self {
        Self {
            kind,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            fields: Vec::new(),
            seeds: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn field(&mut self, key: impl Into<String>, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    pub fn seed(&mut self, role: impl Into<String>, seed: u64) {
        self.seeds.push((role.into(), seed));
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    pub fn summary(&self, cfg: &ExperimentConfig) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment = {}", self.kind);
        let _ = writeln!(s, "anchor = {}", self.kind.anchor());
        let _ = writeln!(s, "seed = {}", cfg.seed);
        for (role, v) in &self.seeds {
            let _ = writeln!(s, "seed.{role} = {v}");
        }
        for (k, v) in &self.fields {
            let _ = writeln!(s, "{k} = {v}");
        }
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "check.{} = {verdict} ({})", c.name, c.detail);
        }
        let _ = writeln!(s, "status = {}", if self.passed() { "PASS" } else { "FAIL" });
        s.push_str("\n# resolved config\n");
        for line in cfg.echo().lines() {
            let _ = writeln!(s, "config.{line}");
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub out_dir: PathBuf,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Run the experiment without writing anything.
pub fn execute(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    runners::dispatch(cfg)
}

/// Run the experiment and write its three output files.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out)?;
    let report = runners::dispatch(cfg)?;
    write_outputs(&report, cfg, &cfg.out)?;
    Ok(RunOutcome {
        report,
        out_dir: cfg.out.clone(),
    })
}

pub fn write_outputs(report: &Report, cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    fs::write(dir.join("raw.csv"), report.csv())?;
    fs::write(dir.join("summary.txt"), report.summary(cfg))?;
    fs::write(dir.join("config.echo"), cfg.echo())?;
    Ok(())
}

/// Reals in CSV rows.
pub(crate) fn num(v: f64) -> String {
    format!("{v:.10e}")
}

/// `2^-k` for powers of two, scientific otherwise.
pub(crate) fn delta_label(d: f64) -> String {
    let k = d.log2();
    if k.fract() == 0.0 {
        format!("2^{}", k as i64)
    } else {
        format!("{d:e}")
    }
}
