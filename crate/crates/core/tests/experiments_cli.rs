use std::fs;
use std::process::Command;

use proptest::prelude::*;
use spherical_maximal::experiments::{
    a_exponent, fit_exponent, predicted_rhs, run, ExperimentConfig, ExperimentKind, RhsKind,
};

fn sphmax() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sphmax"))
}

proptest! {
    #[test]
    fn fit_recovers_noisy_exponent(
        c in 0.1..10.0f64,
        noise in prop::collection::vec(-0.01..0.01f64, 7),
    ) {
        let pts: Vec<(f64, f64)> = (5..=11)
            .zip(&noise)
            .map(|(k, e)| {
                let d = 2f64.powi(-k);
                (d, c * d.powf(2.5) * (1.0 + e))
            })
            .collect();
        let fit = fit_exponent(&pts).unwrap();
        prop_assert!((fit.slope - 2.5).abs() <= 0.05, "{}", fit.slope);
        prop_assert_eq!(fit.points.len(), 7);
    }

    #[test]
    fn fit_is_exact_on_power_laws(e in -3.0..3.0f64, c in 0.01..100.0f64) {
        let pts: Vec<(f64, f64)> = (2..=9).map(|k| 2f64.powi(-k)).map(|d| (d, c * d.powf(e))).collect();
        let fit = fit_exponent(&pts).unwrap();
        prop_assert!((fit.slope - e).abs() <= 1e-9);
        prop_assert!((fit.growth_rate() + e).abs() <= 1e-9);
    }
}

#[test]
fn fit_rejects_short_or_nonpositive_input() {
    assert!(fit_exponent(&[(0.1, 1.0), (0.05, 0.5)]).is_err());
    assert!(fit_exponent(&[(0.1, 1.0), (0.05, 0.0), (0.025, 0.1)]).is_err());
    let cube: Vec<(f64, f64)> = [0.1f64, 0.05, 0.025].iter().map(|&d| (d, d.powi(3))).collect();
    assert!((fit_exponent(&cube).unwrap().slope - 3.0).abs() < 1e-9);
}

#[test]
fn rhs_examples() {
    assert_eq!(a_exponent(3, 3), -1);
    assert_eq!(a_exponent(2, 3), 0);
    let v = predicted_rhs(RhsKind::Multiplicity, 3, 3, 2f64.powi(-6), &[], &[], 256).unwrap();
    assert!((v - 68139.0).abs() < 1.0, "{v}");
}

#[test]
fn run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentKind::EnemyScan);
    cfg.quiet = true;
    cfg.samples = 100_000;
    cfg.out = dir.path().join("enemy");
    let out = run(&cfg).unwrap();
    assert!(out.passed());
    let csv = fs::read_to_string(out.out_dir.join("raw.csv")).unwrap();
    assert!(csv.starts_with("delta,volume,std_error,hits,samples,bounding_volume\n"));
    assert_eq!(csv.lines().count(), 1 + cfg.deltas.len());
    let summary = fs::read_to_string(out.out_dir.join("summary.txt")).unwrap();
    assert!(summary.contains(&format!("anchor = {}", ExperimentKind::EnemyScan.anchor())));
    assert!(summary.contains("status = PASS"));
    assert!(summary.contains("seed.volume.2^-11 = "));
    assert!(summary.contains("slope = "));
    let echo = fs::read_to_string(out.out_dir.join("config.echo")).unwrap();
    let mut back = ExperimentConfig::new(ExperimentKind::EnemyScan);
    back.apply_text(&echo).unwrap();
    back.quiet = true;
    assert_eq!(back, cfg);
}

#[test]
fn every_kind_carries_an_anchor() {
    for k in ExperimentKind::ALL {
        assert!(!k.anchor().is_empty());
        let c = ExperimentConfig::new(k);
        c.validate().unwrap();
    }
}

#[test]
fn cli_runs_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("sweep.conf");
    fs::write(&conf, "# small sweep\nexperiment = focusing-sweep\ndelta = 2^-4..2^-6\np = 1.5\n").unwrap();
    let out = dir.path().join("out");
    let status = sphmax()
        .args(["focusing-sweep", "--quiet", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("raw.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let echo = fs::read_to_string(out.join("config.echo")).unwrap();
    assert!(echo.contains("p = 1.5"));
}

#[test]
fn cli_flags_override_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // an impossible tolerance fails the asserted check
    let status = sphmax()
        .args(["enemy-scan", "--quiet", "--samples", "20000", "--delta", "2^-5", "--delta", "2^-6..2^-7"])
        .args(["--set", "tolerance=0", "--out"])
        .arg(dir.path().join("fail"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let echo = fs::read_to_string(dir.path().join("fail/config.echo")).unwrap();
    assert!(echo.contains("delta = 3.125e-2,1.5625e-2,7.8125e-3"));

    let status = sphmax()
        .args(["cardinality", "--quiet", "--samples", "10"])
        .arg("--out")
        .arg(dir.path().join("bad"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!dir.path().join("bad").exists());
}
