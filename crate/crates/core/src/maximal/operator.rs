//! Region averages, the discretised maximal operators and their norms.

use rayon::prelude::*;

use super::field::ScalarField;
use crate::configurations::family::cube_half_side;
use crate::error::{invalid, Error, Result};
use crate::geometry::{AxisBox, Region, RegionKind, Sphere};
use crate::measure::ball_shell_intersection;
use crate::rng::{child_seed, point_key, substream, CHUNK};

/// Which region the operator averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxVariant {
    Annulus,
    PolarCap,
}

impl MaxVariant {
    pub fn region_kind(self) -> RegionKind {
        match self {
            MaxVariant::Annulus => RegionKind::Annulus,
            MaxVariant::PolarCap => RegionKind::PolarCap,
        }
    }
}

pub const DEFAULT_AVERAGE_SAMPLES: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxProbeConfig {
    pub n: usize,
    pub delta: f64,
    pub p: f64,
    pub radius_step: f64,
    pub radius_range: (f64, f64),
    /// Monte-Carlo samples per `(x, r)` average.
    pub samples: u64,
    pub seed: u64,
}

impl MaxProbeConfig {
    /// Radius step `delta / 2`, radii in `[1, 2]`, default sample budget.
    pub fn new(n: usize, delta: f64, p: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            n,
            delta,
            p,
            radius_step: delta / 2.0,
            radius_range: (1.0, 2.0),
            samples: DEFAULT_AVERAGE_SAMPLES,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid(format!("dimension {} < 2", self.n)));
        }
        if !(self.delta > 0.0 && self.delta < 0.5) {
            return Err(invalid(format!("delta {} outside (0, 1/2)", self.delta)));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(invalid(format!("p = {} must be >= 1", self.p)));
        }
        if !(self.radius_step > 0.0 && self.radius_step <= self.delta / 2.0 * (1.0 + 1e-12)) {
            return Err(invalid(format!("radius step {} must lie in (0, delta/2]", self.radius_step)));
        }
        let (lo, hi) = self.radius_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(invalid(format!("radius range [{lo}, {hi}]")));
        }
        if self.samples == 0 {
            return Err(Error::ZeroSamples);
        }
        Ok(())
    }

    /// `n / (n - 1)`.
    pub fn critical_exponent(&self) -> f64 {
        self.n as f64 / (self.n as f64 - 1.0)
    }

    /// `lo, lo + step, ..`, ending exactly at `hi`.
    pub fn radii(&self) -> Vec<f64> {
        let (lo, hi) = self.radius_range;
        let steps = ((hi - lo) / self.radius_step - 1e-9).ceil().max(0.0) as usize;
        (0..=steps)
            .map(|k| (lo + k as f64 * self.radius_step).min(hi))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Average {
    pub value: f64,
    pub std_error: f64,
    /// Computed in closed form rather than sampled.
    pub exact: bool,
}

impl Average {
    fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            exact: true,
        }
    }
}

/// `(1/|R|) * integral over R of f`. Closed forms for constants, for sums
/// of exact pieces and for a ball averaged over an annulus; Monte Carlo
/// otherwise, drawing from the region's bounding box clipped to the
/// support of `f`.
pub fn region_average(f: &ScalarField, region: &Region, samples: u64, seed: u64) -> Result<Average> {
    if let Some(n) = f.dim() {
        if n != region.dim() {
            return Err(Error::DimensionMismatch {
                expected: region.dim(),
                got: n,
            });
        }
    }
    if f.is_zero() {
        return Ok(Average::exact(0.0));
    }
    match f {
        ScalarField::Constant(c) => return Ok(Average::exact(*c)),
        ScalarField::Sum(parts) => {
            let mut total = Average::exact(0.0);
            let mut var = 0.0;
            for (i, part) in parts.iter().enumerate() {
                let a = region_average(part, region, samples, child_seed(seed, &[i as u64]))?;
                total.value += a.value;
                total.exact &= a.exact;
                var += a.std_error * a.std_error;
            }
            total.std_error = var.sqrt();
            return Ok(total);
        }
        ScalarField::Ball { centre, radius } if region.kind() == RegionKind::Annulus => {
            let s = region.sphere();
            let d = crate::linalg::distance(centre, s.centre());
            let inter = ball_shell_intersection(region.dim(), *radius, d, s.radius(), region.delta());
            return Ok(Average::exact(inter / region.volume()));
        }
        _ => {}
    }
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let mut bbox = region.bounding_box();
    if let Some(support) = f.support_box() {
        bbox = bbox.intersect(&support);
    }
    if bbox.is_empty() || bbox.volume() == 0.0 {
        return Ok(Average::exact(0.0));
    }
    let (s1, s2) = mc_sums(f, region, &bbox, samples, seed);
    let scale = bbox.volume() / region.volume();
    let mean = s1 / samples as f64;
    let var = (s2 / samples as f64 - mean * mean).max(0.0);
    let mut std_error = scale * (var / samples as f64).sqrt();
    if s1 == 0.0 {
        std_error = scale / samples as f64;
    }
    Ok(Average {
        value: scale * mean,
        std_error,
        exact: false,
    })
}

fn mc_sums(f: &ScalarField, region: &Region, bbox: &AxisBox, samples: u64, seed: u64) -> (f64, f64) {
    let n = region.dim();
    let chunk = |k: u64| {
        let mut rng = substream(seed, &[k]);
        let mut y = vec![0.0; n];
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..CHUNK.min(samples - k * CHUNK) {
            bbox.sample_into(&mut rng, &mut y);
            if region.contains(&y) {
                let v = f.value(&y);
                s1 += v;
                s2 += v * v;
            }
        }
        (s1, s2)
    };
    let chunks = samples.div_ceil(CHUNK);
    // Sequential summation in chunk order keeps the result bit-stable.
    let parts: Vec<(f64, f64)> = if chunks > 1 {
        (0..chunks).into_par_iter().map(chunk).collect()
    } else {
        vec![chunk(0)]
    };
    parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Estimate of `sup_r` average, with the maximising radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxEstimate {
    pub value: f64,
    pub std_error: f64,
    pub radius: f64,
}

/// Maximum of [`region_average`] over the radius grid. The average at
/// radius index `k` draws from a substream keyed by `(seed, x, k)`.
/// Radii whose annulus cannot meet the support of `f` are skipped.
pub fn eval_max(f: &ScalarField, x: &[f64], cfg: &MaxProbeConfig, variant: MaxVariant) -> Result<MaxEstimate> {
    cfg.validate()?;
    if x.len() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n,
            got: x.len(),
        });
    }
    let range = f.distance_range(x);
    let key = point_key(x);
    let mut best = MaxEstimate {
        value: 0.0,
        std_error: 0.0,
        radius: cfg.radius_range.0,
    };
    for (k, r) in cfg.radii().into_iter().enumerate() {
        if let Some((near, far)) = range {
            if r + cfg.delta <= near || r - cfg.delta >= far {
                continue;
            }
        }
        let region = Region::new(Sphere::new(x.to_vec(), r)?, cfg.delta, variant.region_kind())?;
        let a = region_average(f, &region, cfg.samples, child_seed(cfg.seed, &[key, k as u64]))?;
        if a.value > best.value {
            best = MaxEstimate {
                value: a.value,
                std_error: a.std_error,
                radius: r,
            };
        }
    }
    Ok(best)
}

/// `(sum |v|^p h^d)^(1/p)`.
///
/// # Panics
/// If `p < 1`.
pub fn lp_norm(values: &[f64], h: f64, d: usize, p: f64) -> f64 {
    assert!(p >= 1.0, "p = {p} < 1");
    let cell = h.powi(d as i32);
    weighted_sum(values.iter().map(|&v| (v, cell)), p)
}

/// `(sum w |v|^p)^(1/p)`.
///
/// # Panics
/// If `p < 1` or the lengths differ.
pub fn weighted_lp_norm(values: &[f64], weights: &[f64], p: f64) -> f64 {
    assert!(p >= 1.0, "p = {p} < 1");
    assert_eq!(values.len(), weights.len());
    weighted_sum(values.iter().copied().zip(weights.iter().copied()), p)
}

fn weighted_sum(items: impl Iterator<Item = (f64, f64)>, p: f64) -> f64 {
    let total: f64 = items.map(|(v, w)| w * v.abs().powf(p)).sum();
    total.powf(1.0 / p)
}

/// Norm of a field sampled on a grid, with a linearised standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct GridNorm {
    pub value: f64,
    pub std_error: f64,
    pub p: f64,
    pub spacing: f64,
    pub points: usize,
}

fn grid_norm(est: &[MaxEstimate], h: f64, d: usize, p: f64) -> GridNorm {
    let values: Vec<f64> = est.iter().map(|e| e.value).collect();
    let value = lp_norm(&values, h, d, p);
    // d||F||_p / dF_i = h^d F_i^(p-1) / ||F||^(p-1)
    let cell = h.powi(d as i32);
    let std_error = if value > 0.0 {
        let var: f64 = est
            .iter()
            .map(|e| (cell * e.value.powf(p - 1.0) * e.std_error).powi(2))
            .sum();
        var.sqrt() / value.powf(p - 1.0)
    } else {
        0.0
    };
    GridNorm {
        value,
        std_error,
        p,
        spacing: h,
        points: values.len(),
    }
}

/// Cell centres of a grid of spacing at most `max_h` on the cube
/// `Q^dims` shifted by `shift`; returns the points and the actual spacing.
fn cube_grid(n: usize, dims: usize, max_h: f64, shift: &[f64]) -> (Vec<Vec<f64>>, f64) {
    let side = 2.0 * cube_half_side(n);
    let k = (side / max_h - 1e-9).ceil().max(1.0) as usize;
    let h = side / k as f64;
    let total = k.pow(dims as u32);
    let points = (0..total)
        .map(|flat| {
            let mut x = shift.to_vec();
            let mut rest = flat;
            for axis in (0..dims).rev() {
                x[axis] += -0.5 * side + (rest % k) as f64 * h + 0.5 * h;
                rest /= k;
            }
            x
        })
        .collect();
    (points, h)
}

/// `L^{p_n}` norm of `M^{delta,*} f` over `Q^{n-1} x {0}` on a grid of
/// spacing at most `delta`.
pub fn sliced_max_norm(f: &ScalarField, cfg: &MaxProbeConfig) -> Result<GridNorm> {
    sliced_max_norm_shifted(f, cfg, &vec![0.0; cfg.n])
}

/// [`sliced_max_norm`] over the slice grid translated by `shift`; the last
/// coordinate of `shift` is the slice height.
pub fn sliced_max_norm_shifted(f: &ScalarField, cfg: &MaxProbeConfig, shift: &[f64]) -> Result<GridNorm> {
    cfg.validate()?;
    if shift.len() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n,
            got: shift.len(),
        });
    }
    let (points, h) = cube_grid(cfg.n, cfg.n - 1, cfg.delta, shift);
    let est = eval_all(f, &points, cfg, MaxVariant::PolarCap)?;
    Ok(grid_norm(&est, h, cfg.n - 1, cfg.critical_exponent()))
}

/// `L^{p_n}` norm of `M^{delta,*} f` over the full cube `Q^n` on a grid of
/// spacing at most `max_h`.
pub fn full_max_norm(f: &ScalarField, cfg: &MaxProbeConfig, max_h: f64) -> Result<GridNorm> {
    cfg.validate()?;
    let (points, h) = cube_grid(cfg.n, cfg.n, max_h, &vec![0.0; cfg.n]);
    let est = eval_all(f, &points, cfg, MaxVariant::PolarCap)?;
    Ok(grid_norm(&est, h, cfg.n, cfg.critical_exponent()))
}

pub(crate) fn eval_all(f: &ScalarField, points: &[Vec<f64>], cfg: &MaxProbeConfig, variant: MaxVariant) -> Result<Vec<MaxEstimate>> {
    points
        .par_iter()
        .map(|x| eval_max(f, x, cfg, variant))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(delta: f64) -> MaxProbeConfig {
        MaxProbeConfig::new(3, delta, 1.5, 7).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(0.1);
        assert!((c.critical_exponent() - 1.5).abs() < 1e-15);
        c.radius_step = 0.06;
        assert!(c.validate().is_err());
        assert!(MaxProbeConfig::new(3, 0.1, 0.5, 1).is_err());
        let r = cfg(0.1).radii();
        assert_eq!(r.first(), Some(&1.0));
        assert_eq!(r.last(), Some(&2.0));
        assert_eq!(r.len(), 21);
    }

    #[test]
    fn constant_average_is_exact() {
        let region = Region::polar_cap(Sphere::new(vec![0.0; 3], 1.5).unwrap(), 0.05).unwrap();
        let a = region_average(&ScalarField::Constant(2.5), &region, 100, 1).unwrap();
        assert_eq!(a.value, 2.5);
        assert!(a.exact);
    }

    #[test]
    fn half_space_average_is_half() {
        let region = Region::annulus(Sphere::new(vec![0.0; 3], 1.0).unwrap(), 0.1).unwrap();
        let f = ScalarField::half_space(vec![0.0, 0.0, 1.0], 0.0).unwrap();
        let a = region_average(&f, &region, 200_000, 3).unwrap();
        assert!((a.value - 0.5).abs() < 4.0 * a.std_error + 1e-3, "{a:?}");
    }

    #[test]
    fn exact_ball_path_matches_sampling() {
        let region = Region::annulus(Sphere::new(vec![0.0; 3], 1.2).unwrap(), 0.05).unwrap();
        let f = ScalarField::ball(vec![1.21, 0.0, 0.0], 0.08).unwrap();
        let exact = region_average(&f, &region, 1, 0).unwrap();
        assert!(exact.exact);
        let g = ScalarField::Sum(vec![f.clone(), ScalarField::Constant(0.0)]);
        assert!(region_average(&g, &region, 1, 0).unwrap().exact);
        // Sampling route: the cap region never takes the closed form.
        let vox = crate::maximal::field::VoxelGrid::rasterise(&f, vec![1.1, -0.1, -0.1], 0.002, vec![110, 100, 100]).unwrap();
        let mc = region_average(&ScalarField::Voxel(vox), &region, 400_000, 5).unwrap();
        assert!((mc.value - exact.value).abs() < 4.0 * mc.std_error + 0.02 * exact.value, "{mc:?} vs {exact:?}");
    }

    #[test]
    fn zero_and_constant_max() {
        let c = cfg(0.125);
        let x = [0.1, 0.0, 0.0];
        assert_eq!(eval_max(&ScalarField::Constant(0.0), &x, &c, MaxVariant::Annulus).unwrap().value, 0.0);
        for v in [MaxVariant::Annulus, MaxVariant::PolarCap] {
            assert_eq!(eval_max(&ScalarField::Constant(1.0), &x, &c, v).unwrap().value, 1.0);
        }
    }

    #[test]
    fn focused_ball_attains_near_its_distance() {
        let delta = 1.0 / 32.0;
        let c = cfg(delta);
        let f = ScalarField::ball(vec![0.0; 3], delta).unwrap();
        let m = eval_max(&f, &[1.5, 0.0, 0.0], &c, MaxVariant::Annulus).unwrap();
        assert!((m.radius - 1.5).abs() <= delta / 2.0);
        // Ball inside the annulus: |B| / |A|.
        let shell = crate::measure::shell_volume(3, 1.5, delta);
        let ball = crate::measure::unit_ball_volume(3) * delta.powi(3);
        assert!((m.value - ball / shell).abs() < 1e-12);
    }

    #[test]
    fn norms() {
        assert!((lp_norm(&[1.0; 100], 0.1, 2, 1.7) - 1.0).abs() < 1e-12);
        let v = [0.3, 1.2, 0.0, 2.0];
        let scaled: Vec<f64> = v.iter().map(|x| 3.5 * x).collect();
        assert!((lp_norm(&scaled, 0.2, 3, 2.5) - 3.5 * lp_norm(&v, 0.2, 3, 2.5)).abs() < 1e-12);
        assert!((lp_norm(&v, 0.5, 1, 1.0) - 3.5 * 0.5).abs() < 1e-15);
        assert!((weighted_lp_norm(&[2.0, 1.0], &[0.25, 1.0], 2.0) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sliced_norm_of_constant() {
        let c = cfg(0.125);
        let one = sliced_max_norm(&ScalarField::Constant(1.0), &c).unwrap();
        let area = (2.0 * cube_half_side(3)).powi(2);
        assert!((one.value - area.powf(1.0 / 1.5)).abs() < 1e-12);
        assert_eq!(sliced_max_norm(&ScalarField::Constant(0.0), &c).unwrap().value, 0.0);
    }
}
