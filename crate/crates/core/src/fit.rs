//! Least-squares scaling exponents.

use crate::error::{invalid, Result};

/// Ordinary least-squares fit of `ln value = intercept + slope * ln delta`.
/// `points` holds `(ln(1/delta), ln value)`; `slope` is the exponent in
/// `value ~ delta^slope`, so it is minus the slope in those coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero for fewer than three points.
    pub std_error: f64,
    pub points: Vec<(f64, f64)>,
}

impl FitResult {
    /// Exponent of growth in `1/delta`.
    pub fn growth_rate(&self) -> f64 {
        -self.slope
    }
}

/// Fit `value ~ C delta^slope` to `(delta, value)` pairs.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(invalid(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(&(d, v)) = points.iter().find(|(d, v)| !(*d > 0.0 && *v > 0.0 && d.is_finite() && v.is_finite())) {
        return Err(invalid(format!("point ({d}, {v}) must be positive and finite")));
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(d, _)| d.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(invalid("all deltas coincide"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let std_error = if points.len() > 2 { (ssr / (k - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(FitResult {
        slope,
        intercept,
        std_error,
        points: xs.iter().zip(&ys).map(|(x, y)| (-x, *y)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = (3..9).map(|k| {
            let d = 2f64.powi(-k);
            (d, 0.7 * d.powi(3))
        }).collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-9);
        assert!((f.intercept - 0.7f64.ln()).abs() < 1e-9);
        assert!(f.std_error < 1e-9);
        assert!((f.points[0].0 - 8f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn too_few_or_bad_points() {
        assert!(fit_exponent(&[(0.5, 1.0), (0.25, 0.5)]).is_err());
        assert!(fit_exponent(&[(0.5, 1.0), (0.25, 0.0), (0.125, 1.0)]).is_err());
        assert!(fit_exponent(&[(0.5, 1.0), (0.5, 2.0), (0.5, 1.0)]).is_err());
    }
}
