//! Norm of `M^delta` on the indicator of a small ball: the example that
//! forces polynomial growth below the critical exponent.

use rayon::prelude::*;

use super::field::ScalarField;
use super::operator::{eval_max, weighted_lp_norm, MaxProbeConfig, MaxVariant};
use crate::error::{invalid, Result};
use crate::fit::{fit_exponent, FitResult};
use crate::measure::unit_ball_volume;

/// Radial cells per `delta` on the evaluation shell.
pub const RADIAL_CELLS_PER_DELTA: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FocusingPoint {
    pub delta: f64,
    pub max_norm: f64,
    pub f_norm: f64,
    pub ratio: f64,
}

/// `||M^delta f||_p / ||f||_p` for `f` the indicator of `B(0, delta)`, the
/// left norm taken over the shell `1 <= |x| <= 2`. `M^delta f` is radial,
/// so it is evaluated on a midpoint grid in `|x|` of spacing `delta / 8`
/// and weighted by the measure of each spherical shell.
pub fn focusing_ratio(cfg: &MaxProbeConfig) -> Result<FocusingPoint> {
    cfg.validate()?;
    let (n, delta, p) = (cfg.n, cfg.delta, cfg.p);
    let f = ScalarField::ball(vec![0.0; n], delta)?;
    let cells = (RADIAL_CELLS_PER_DELTA / delta).ceil() as usize;
    let ds = 1.0 / cells as f64;
    let vn = unit_ball_volume(n);
    let (values, weights): (Vec<f64>, Vec<f64>) = (0..cells)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (1.0 + i as f64 * ds, 1.0 + (i + 1) as f64 * ds);
            let mut x = vec![0.0; n];
            x[0] = 0.5 * (a + b);
            let m = eval_max(&f, &x, cfg, MaxVariant::Annulus)?;
            Ok((m.value, vn * (b.powi(n as i32) - a.powi(n as i32))))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let max_norm = weighted_lp_norm(&values, &weights, p);
    let f_norm = (vn * delta.powi(n as i32)).powf(1.0 / p);
    Ok(FocusingPoint {
        delta,
        max_norm,
        f_norm,
        ratio: max_norm / f_norm,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocusingProbe {
    pub n: usize,
    pub p: f64,
    pub points: Vec<FocusingPoint>,
    pub fit: FitResult,
    /// Fitted exponent of growth in `1/delta`.
    pub growth: f64,
    /// `n/p - (n - 1)`.
    pub predicted: f64,
}

/// [`focusing_ratio`] over a sweep of `deltas`, with the fitted growth rate
/// of the ratio in `1/delta`.
pub fn focusing_probe(n: usize, p: f64, deltas: &[f64], seed: u64) -> Result<FocusingProbe> {
    if deltas.len() < 3 {
        return Err(invalid("focusing sweep needs at least 3 deltas"));
    }
    let points = deltas
        .iter()
        .map(|&d| focusing_ratio(&MaxProbeConfig::new(n, d, p, seed)?))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_exponent(&points.iter().map(|q| (q.delta, q.ratio)).collect::<Vec<_>>())?;
    Ok(FocusingProbe {
        n,
        p,
        growth: fit.growth_rate(),
        predicted: predicted_focusing_growth(n, p),
        points,
        fit,
    })
}

pub fn predicted_focusing_growth(n: usize, p: f64) -> f64 {
    n as f64 / p - (n as f64 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_sign_follows_exponent() {
        let deltas = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];
        for (p, want) in [(1.2, 0.5), (1.5, 0.0), (2.0, -0.5)] {
            let probe = focusing_probe(3, p, &deltas, 1).unwrap();
            assert!((probe.predicted - want).abs() < 1e-12);
            assert!((probe.growth - want).abs() < 0.15, "p={p}: {}", probe.growth);
        }
    }
}
