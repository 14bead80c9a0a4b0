//! Volume oracles for intersections of regions: seeded Monte Carlo with a
//! binomial error model, a cell-centre grid count as an independent check,
//! the slab-parallelepiped predictor and the closed-form tuple bound.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::geometry::{slab_of_pair, AxisBox, Region, Slab};
use crate::linalg;
use crate::rng::{substream, CHUNK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VolumeMethod {
    MonteCarlo,
    Grid,
}

/// An estimate of an `n`-dimensional volume.
///
/// For Monte Carlo, `std_error` is the binomial standard error
/// `bounding_volume * sqrt(p(1-p)/samples)`; a run with zero hits reports
/// `bounding_volume / samples`, so that `3 * std_error` is the one-sided 95%
/// upper bound. For the grid, `samples` counts cells, `hits` counts cells
/// whose centre lies in every region and `std_error` is the boundary-cell
/// proxy `h^n * sqrt(boundary_cells / 6)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
    pub method: VolumeMethod,
    pub bounding_volume: f64,
}

impl VolumeEstimate {
    fn zero(method: VolumeMethod) -> Self {
        VolumeEstimate {
            value: 0.0,
            std_error: 0.0,
            samples: 0,
            hits: 0,
            method,
            bounding_volume: 0.0,
        }
    }

    /// One-sided 95% upper bound on the true volume.
    pub fn upper_bound(&self) -> f64 {
        self.value + 3.0 * self.std_error
    }

    pub fn hit_rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.hits as f64 / self.samples as f64
        }
    }
}

fn check_regions(regions: &[Region]) -> Result<usize> {
    let first = regions
        .first()
        .ok_or_else(|| invalid("at least one region is required"))?;
    let n = first.dim();
    for r in regions {
        if r.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: r.dim(),
            });
        }
    }
    Ok(n)
}

/// Bounding box of the first region, intersected with every other region's
/// box and clipped by the pairwise slabs and outer balls.
///
/// The returned box always contains the intersection of the regions; it
/// may be empty when the regions provably do not meet.
pub fn sampling_box(regions: &[Region]) -> Result<AxisBox> {
    check_regions(regions)?;
    let mut bbox = regions[0].bounding_box();
    for r in &regions[1..] {
        bbox = bbox.intersect(&r.bounding_box());
    }
    let mut slabs = Vec::new();
    for i in 0..regions.len() {
        for j in (i + 1)..regions.len() {
            let delta = regions[i].delta().max(regions[j].delta());
            if let Ok(s) = slab_of_pair(regions[i].sphere(), regions[j].sphere(), delta) {
                slabs.push(s);
            }
        }
    }
    for _ in 0..4 {
        if bbox.is_empty() {
            break;
        }
        for s in &slabs {
            bbox.tighten_by_slab(s.normal(), s.offset(), s.half_thickness());
        }
        for r in regions {
            bbox.tighten_by_ball(r.sphere().centre(), r.sphere().radius() + r.delta());
        }
    }
    Ok(bbox)
}

fn inside_all(regions: &[Region], y: &[f64]) -> bool {
    regions.iter().all(|r| r.contains(y))
}

/// Monte-Carlo estimate of `|∩ regions|` from `samples` uniform draws in
/// `bbox`, which must contain the intersection. Deterministic for a fixed
/// seed: chunk `k` always draws from substream `(seed, k)`.
pub fn mc_volume(
    regions: &[Region],
    bbox: &AxisBox,
    samples: u64,
    seed: u64,
) -> Result<VolumeEstimate> {
    let n = check_regions(regions)?;
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    if bbox.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bbox.dim(),
        });
    }
    let volume = bbox.volume();
    if volume == 0.0 {
        return Ok(VolumeEstimate {
            samples,
            ..VolumeEstimate::zero(VolumeMethod::MonteCarlo)
        });
    }
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, &[k]);
            let count = CHUNK.min(samples - k * CHUNK);
            let mut y = vec![0.0; n];
            let mut h = 0u64;
            for _ in 0..count {
                bbox.sample_into(&mut rng, &mut y);
                if inside_all(regions, &y) {
                    h += 1;
                }
            }
            h
        })
        .sum();
    Ok(binomial_estimate(volume, hits, samples))
}

pub(crate) fn binomial_estimate(volume: f64, hits: u64, samples: u64) -> VolumeEstimate {
    let p = hits as f64 / samples as f64;
    let std_error = if hits == 0 {
        volume / samples as f64
    } else {
        volume * (p * (1.0 - p) / samples as f64).sqrt()
    };
    VolumeEstimate {
        value: volume * p,
        std_error,
        samples,
        hits,
        method: VolumeMethod::MonteCarlo,
        bounding_volume: volume,
    }
}

/// [`mc_volume`] over [`sampling_box`].
pub fn mc_volume_clipped(regions: &[Region], samples: u64, seed: u64) -> Result<VolumeEstimate> {
    let bbox = sampling_box(regions)?;
    mc_volume(regions, &bbox, samples, seed)
}

/// Hard cap on the number of grid cells a single call may visit.
pub const MAX_GRID_CELLS: u64 = 1 << 34;

/// Cell-centre count of `|∩ regions|` on a grid of spacing `h` anchored at
/// the corner of [`sampling_box`]. Requires `h <= delta / 4` for the
/// thinnest region.
pub fn grid_volume(regions: &[Region], h: f64) -> Result<VolumeEstimate> {
    let n = check_regions(regions)?;
    let delta = regions
        .iter()
        .map(|r| r.delta())
        .fold(f64::INFINITY, f64::min);
    let limit = delta / 4.0;
    if !(h > 0.0) || h > limit * (1.0 + 1e-12) {
        return Err(Error::CoarseResolution { h, limit });
    }
    let bbox = sampling_box(regions)?;
    if bbox.is_empty() {
        return Ok(VolumeEstimate::zero(VolumeMethod::Grid));
    }
    let counts: Vec<u64> = bbox
        .lo
        .iter()
        .zip(&bbox.hi)
        .map(|(l, u)| (((u - l) / h).ceil() as u64).max(1))
        .collect();
    let total: u64 = counts.iter().product();
    if total > MAX_GRID_CELLS {
        return Err(invalid(format!("grid of {total} cells exceeds the cap")));
    }
    let cell = h.powi(n as i32);
    let band = 0.5 * h * (n as f64).sqrt();
    let inner: u64 = counts[1..].iter().product();
    let (hits, uncertain) = (0..counts[0])
        .into_par_iter()
        .map(|i0| {
            let mut y = vec![0.0; n];
            let mut idx = vec![0u64; n];
            idx[0] = i0;
            let (mut hits, mut uncertain) = (0u64, 0u64);
            for flat in 0..inner {
                let mut rem = flat;
                for d in (1..n).rev() {
                    idx[d] = rem % counts[d];
                    rem /= counts[d];
                }
                for d in 0..n {
                    y[d] = bbox.lo[d] + (idx[d] as f64 + 0.5) * h;
                }
                let m = regions
                    .iter()
                    .map(|r| r.margin(&y))
                    .fold(f64::INFINITY, f64::min);
                if m > 0.0 {
                    hits += 1;
                }
                if m.abs() <= band {
                    uncertain += 1;
                }
            }
            (hits, uncertain)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(VolumeEstimate {
        value: hits as f64 * cell,
        std_error: cell * (uncertain as f64 / 6.0).sqrt(),
        samples: total,
        hits,
        method: VolumeMethod::Grid,
        bounding_volume: total as f64 * cell,
    })
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Volume of `R = ∩ slabs ∩ bbox` for slabs in a common space.
///
/// With as many slabs as dimensions and `R` inside the box this is
/// `prod(2 w_j) / |n_1 ∧ ... ∧ n_k|`. Axis-aligned slabs are clipped
/// exactly; any other clipped configuration falls back to a midpoint-rule
/// grid of at most `2^24` cells over the propagated bounding box.
pub fn parallelepiped_volume(slabs: &[Slab], bbox: &AxisBox) -> Result<f64> {
    let d = bbox.dim();
    if slabs.len() > d {
        return Err(invalid(format!(
            "{} slabs in dimension {d}: normals cannot be independent",
            slabs.len()
        )));
    }
    for s in slabs {
        if s.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
    }
    let normals: Vec<Vec<f64>> = slabs.iter().map(|s| s.normal().to_vec()).collect();
    linalg::orthonormalise(&normals)?;
    if bbox.is_empty() {
        return Ok(0.0);
    }

    if slabs.len() == d {
        let wedge = linalg::wedge_norm(&normals);
        let formula: f64 = slabs.iter().map(|s| 2.0 * s.half_thickness()).product::<f64>() / wedge;
        let mut inside = true;
        for corner in 0..(1u64 << d) {
            let rhs: Vec<f64> = slabs
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    let sign = if corner >> j & 1 == 1 { 1.0 } else { -1.0 };
                    s.offset() + sign * s.half_thickness()
                })
                .collect();
            match solve(normals.clone(), rhs) {
                Some(v) if bbox.contains(&v) => {}
                _ => {
                    inside = false;
                    break;
                }
            }
        }
        if inside {
            return Ok(formula);
        }
    }

    let axis_of = |s: &Slab| {
        let nz: Vec<usize> = (0..d).filter(|&k| s.normal()[k] != 0.0).collect();
        (nz.len() == 1).then(|| nz[0])
    };
    let axes: Option<Vec<usize>> = slabs.iter().map(axis_of).collect();
    if let Some(axes) = axes {
        let mut b = bbox.clone();
        for (s, &k) in slabs.iter().zip(&axes) {
            let sign = s.normal()[k];
            let (c, w) = (s.offset() * sign, s.half_thickness());
            b.lo[k] = b.lo[k].max(c - w);
            b.hi[k] = b.hi[k].min(c + w);
        }
        return Ok(b.volume());
    }

    let mut b = bbox.clone();
    for _ in 0..4 {
        for s in slabs {
            b.tighten_by_slab(s.normal(), s.offset(), s.half_thickness());
        }
    }
    if b.is_empty() {
        return Ok(0.0);
    }
    let per_axis = ((1u64 << 24) as f64).powf(1.0 / d as f64).floor().max(1.0) as u64;
    let steps: Vec<f64> = b.lo.iter().zip(&b.hi).map(|(l, h)| (h - l) / per_axis as f64).collect();
    let cell: f64 = steps.iter().product();
    let total = per_axis.pow(d as u32);
    let hits = (0..total)
        .into_par_iter()
        .filter(|&flat| {
            let mut rem = flat;
            let y: Vec<f64> = (0..d)
                .map(|k| {
                    let i = rem % per_axis;
                    rem /= per_axis;
                    b.lo[k] + (i as f64 + 0.5) * steps[k]
                })
                .collect();
            slabs.iter().all(|s| s.contains(&y))
        })
        .count();
    Ok(hits as f64 * cell)
}

/// The closed-form tuple bound `delta^m / (prod t_j * prod theta_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundPrediction {
    pub m: usize,
    pub delta: f64,
    /// `t_2 .. t_m`.
    pub t_list: Vec<f64>,
    /// `theta_3 .. theta_m`.
    pub theta_list: Vec<f64>,
    pub value: f64,
}

pub fn predicted_tuple_bound(
    m: usize,
    delta: f64,
    t_list: &[f64],
    theta_list: &[f64],
) -> Result<BoundPrediction> {
    if m < 2 {
        return Err(invalid("tuple length must be at least 2"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if t_list.len() != m - 1 || theta_list.len() != m - 2 {
        return Err(invalid(format!(
            "expected {} distances and {} angles, got {} and {}",
            m - 1,
            m - 2,
            t_list.len(),
            theta_list.len()
        )));
    }
    for (j, &t) in t_list.iter().enumerate() {
        if !(t >= delta && t <= 1.0) {
            return Err(invalid(format!("t_{} = {t} outside [delta, 1]", j + 2)));
        }
    }
    for (j, &theta) in theta_list.iter().enumerate() {
        let t = t_list[j + 1];
        if !(theta >= delta / t && theta <= 1.0) {
            return Err(invalid(format!(
                "theta_{} = {theta} outside [delta/t, 1] = [{}, 1]",
                j + 3,
                delta / t
            )));
        }
    }
    let denom: f64 = t_list.iter().product::<f64>() * theta_list.iter().product::<f64>();
    Ok(BoundPrediction {
        m,
        delta,
        t_list: t_list.to_vec(),
        theta_list: theta_list.to_vec(),
        value: delta.powi(m as i32) / denom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Sphere;

    fn ann(c: &[f64], r: f64, d: f64) -> Region {
        Region::annulus(Sphere::new(c.to_vec(), r).unwrap(), d).unwrap()
    }

    #[test]
    fn zero_samples_is_an_error() {
        let r = ann(&[0.0, 0.0, 0.0], 1.0, 0.01);
        assert!(matches!(
            mc_volume_clipped(&[r], 0, 1),
            Err(Error::ZeroSamples)
        ));
    }

    #[test]
    fn disjoint_annuli_give_zero() {
        let a = ann(&[0.0, 0.0, 0.0], 2.0, 0.01);
        let b = ann(&[5.0, 0.0, 0.0], 2.0, 0.01);
        let est = mc_volume_clipped(&[a.clone(), b.clone()], 100_000, 3).unwrap();
        assert_eq!(est.hits, 0);
        assert_eq!(est.value, 0.0);
        let g = grid_volume(&[a, b], 0.0025).unwrap();
        assert_eq!(g.value, 0.0);
    }

    #[test]
    fn coarse_grid_rejected() {
        let a = ann(&[0.0, 0.0], 1.0, 0.04);
        assert!(matches!(
            grid_volume(&[a], 0.02),
            Err(Error::CoarseResolution { .. })
        ));
    }

    #[test]
    fn determinism() {
        let a = ann(&[0.0, 0.0, 0.0], 1.2, 0.05);
        let b = ann(&[0.6, 0.0, 0.0], 1.1, 0.05);
        let x = mc_volume_clipped(&[a.clone(), b.clone()], 50_000, 17).unwrap();
        let y = mc_volume_clipped(&[a, b], 50_000, 17).unwrap();
        assert_eq!(x, y);
        assert_eq!(x.value.to_bits(), y.value.to_bits());
    }

    #[test]
    fn tuple_bound_examples() {
        let b = predicted_tuple_bound(2, 0.01, &[0.5], &[]).unwrap();
        assert!((b.value - 2e-4).abs() < 1e-18);
        let b = predicted_tuple_bound(3, 0.01, &[0.5, 0.5], &[0.25]).unwrap();
        assert!((b.value - 1.6e-5).abs() < 1e-18);
        assert!(predicted_tuple_bound(3, 0.01, &[0.5, 0.5], &[0.01]).is_err());
        assert!(predicted_tuple_bound(3, 0.01, &[0.005, 0.5], &[0.5]).is_err());
    }

    #[test]
    fn parallelepiped_examples() {
        let big = AxisBox::cube(2, 10.0);
        let s1 = Slab::new(vec![1.0, 0.0], 0.0, 0.1).unwrap();
        let s2 = Slab::new(vec![0.0, 1.0], 0.3, 0.2).unwrap();
        let v = parallelepiped_volume(&[s1, s2], &big).unwrap();
        assert!((v - 4.0 * 0.1 * 0.2).abs() < 1e-15);

        let w = 0.05;
        let a = 30f64.to_radians();
        let s1 = Slab::new(vec![1.0, 0.0], 0.0, w).unwrap();
        let s2 = Slab::new(vec![a.cos(), a.sin()], 0.0, w).unwrap();
        let v = parallelepiped_volume(&[s1, s2], &big).unwrap();
        assert!((v - 8.0 * w * w).abs() < 1e-14);

        let unit = AxisBox::cube(2, 0.5);
        let s = Slab::new(vec![1.0, 0.0], 0.0, w).unwrap();
        let v = parallelepiped_volume(&[s], &unit).unwrap();
        assert!((v - 2.0 * w).abs() < 1e-15);
    }

    #[test]
    fn parallelepiped_rejects_dependent_normals() {
        let s1 = Slab::new(vec![1.0, 0.0], 0.0, 0.1).unwrap();
        let s2 = Slab::new(vec![-1.0, 0.0], 0.3, 0.2).unwrap();
        assert!(parallelepiped_volume(&[s1, s2], &AxisBox::cube(2, 1.0)).is_err());
    }

    #[test]
    fn clipped_oblique_slab_uses_quadrature() {
        // Diagonal strip |x + y| < 2w through the unit box centre; the
        // complement is two right triangles with legs 1 - 2w.
        let w = 0.01;
        let s = Slab::new(vec![1.0, 1.0], 0.0, 2.0 * w).unwrap();
        let v = parallelepiped_volume(&[s], &AxisBox::cube(2, 0.5)).unwrap();
        let leg = 1.0 - 2.0 * w;
        let exact = 1.0 - leg * leg;
        assert!((v - exact).abs() < 5e-4, "{v} vs {exact}");
    }
}
