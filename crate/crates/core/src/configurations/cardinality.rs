//! Exhaustive counts of the dyadic shells and angular sectors around a
//! sphere, compared with their packing bounds.

use std::collections::BTreeMap;

use rand::seq::index;
use rayon::prelude::*;

use super::buckets::dyadic_exponent;
use super::family::SphereFamily;
use crate::error::{invalid, Result};
use crate::geometry::{centre_distance, unit_direction, Sphere};
use crate::linalg::{norm, proj_orthocomplement};
use crate::rng::substream;

/// Counts for one choice of priors and scales, with their bounds:
/// `theta^(n-j+1) t^(n-1) / delta^(n-1)` for the angular sector,
/// `(t/delta)^(n-1)` for the distance shell and `(t/delta)^(i_j - 1)` for
/// the degenerate sector, `i_j - 1` being the number of prior directions.
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityReport {
    pub j: usize,
    pub count_distance: u64,
    pub bound_distance: f64,
    /// Absent for `j = 2`, where there is no earlier direction.
    pub count_angular: Option<u64>,
    pub bound_angular: Option<f64>,
    pub count_degenerate: Option<u64>,
    pub bound_degenerate: Option<f64>,
}

impl CardinalityReport {
    pub fn ratio_distance(&self) -> f64 {
        self.count_distance as f64 / self.bound_distance
    }

    pub fn ratio_angular(&self) -> Option<f64> {
        Some(self.count_angular? as f64 / self.bound_angular?)
    }

    pub fn ratio_degenerate(&self) -> Option<f64> {
        Some(self.count_degenerate? as f64 / self.bound_degenerate?)
    }
}

/// Counts members of the family at distance in `[t/2, t]` from `C1` and,
/// for `j >= 3`, those whose direction from `C1` keeps a component in
/// `[theta/2, theta]` (angular sector) or at most `2 delta / t`
/// (degenerate sector) after projecting out the prior directions.
///
/// `priors` lists family indices of `C1, .., C_{j-1}`.
pub fn cardinality_audit(family: &SphereFamily, priors: &[usize], t: f64, theta: f64) -> Result<CardinalityReport> {
    let delta = family.delta();
    let n = family.n();
    if priors.is_empty() {
        return Err(invalid("priors must contain at least C1"));
    }
    if let Some(&bad) = priors.iter().find(|&&i| i >= family.len()) {
        return Err(invalid(format!("prior index {bad} out of range")));
    }
    if !(t >= delta && t <= 1.0) {
        return Err(invalid(format!("t = {t} outside [delta, 1]")));
    }
    if !(theta >= delta / t && theta <= 1.0) {
        return Err(invalid(format!("theta = {theta} outside [delta/t, 1]")));
    }
    let spheres = family.spheres();
    let c1 = &spheres[priors[0]];
    let basis = priors[1..]
        .iter()
        .map(|&i| Ok(unit_direction(c1, &spheres[i])?.e_full))
        .collect::<Result<Vec<_>>>()?;
    let j = priors.len() + 1;
    let in_shell = |c: &Sphere| {
        let d = centre_distance(c1, c);
        d >= 0.5 * t && d <= t
    };
    let shell: Vec<&Sphere> = spheres.iter().filter(|c| in_shell(c)).collect();
    let nf = n as f64;
    let mut report = CardinalityReport {
        j,
        count_distance: shell.len() as u64,
        bound_distance: (t / delta).powf(nf - 1.0),
        count_angular: None,
        bound_angular: None,
        count_degenerate: None,
        bound_degenerate: None,
    };
    if j >= 3 {
        let (mut ang, mut deg) = (0u64, 0u64);
        for c in &shell {
            let e = unit_direction(c1, c)?.e_full;
            let v = norm(&proj_orthocomplement(&basis, &e)?);
            if v >= 0.5 * theta && v <= theta {
                ang += 1;
            }
            if v <= 2.0 * delta / t {
                deg += 1;
            }
        }
        report.count_angular = Some(ang);
        report.bound_angular = Some(theta.powf(nf - j as f64 + 1.0) * (t / delta).powf(nf - 1.0));
        report.count_degenerate = Some(deg);
        report.bound_degenerate = Some((t / delta).powi(priors.len() as i32 - 1));
    }
    Ok(report)
}

/// Largest count-to-bound ratios found around sampled first spheres.
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityScan {
    pub delta: f64,
    pub family_size: usize,
    pub centres_scanned: usize,
    /// Max over `C1, t` of `#{dist in (t/2, t]} / (t/delta)^(n-1)`.
    pub k_distance: f64,
    /// Max over `C1, C2, t, theta` of the angular-sector ratio at `j = 3`.
    pub k_angular: f64,
    /// Max over `C1, C2, t` of the degenerate-sector ratio at `j = 3`.
    pub k_degenerate: f64,
}

/// Scan `centres` randomly chosen first spheres against the whole family,
/// with every separated second sphere as the prior at `j = 3`. Scales are
/// the half-open dyadic classes used by the bucket classifier.
pub fn cardinality_scan(family: &SphereFamily, centres: usize, seed: u64) -> Result<CardinalityScan> {
    let n = family.n();
    if n < 3 {
        return Err(invalid("the angular scan needs n >= 3"));
    }
    let delta = family.delta();
    let spheres = family.spheres();
    let count = family.len();
    let picks = centres.min(count);
    let mut rng = substream(seed, &[0xCA]);
    let mut chosen = index::sample(&mut rng, count, picks).into_vec();
    chosen.sort_unstable();
    let nf = n as f64;
    let mut k_distance = 0.0f64;
    let mut k_angular = 0.0f64;
    let mut k_degenerate = 0.0f64;
    for &i1 in &chosen {
        let c1 = &spheres[i1];
        let mut shells: BTreeMap<i32, u64> = BTreeMap::new();
        for (i, c) in spheres.iter().enumerate() {
            if i != i1 {
                *shells.entry(dyadic_exponent(centre_distance(c1, c))).or_insert(0) += 1;
            }
        }
        for (&k, &c) in &shells {
            let t = 2f64.powi(k);
            k_distance = k_distance.max(c as f64 / (t / delta).powf(nf - 1.0));
        }
        let (ka, kd) = (0..count)
            .into_par_iter()
            .filter(|&i2| i2 != i1 && centre_distance(c1, &spheres[i2]) >= 2.0 * delta)
            .map(|i2| {
                let e2 = unit_direction(c1, &spheres[i2]).unwrap().e_full;
                let mut sectors: BTreeMap<(i32, i32), u64> = BTreeMap::new();
                let mut degenerate: BTreeMap<i32, u64> = BTreeMap::new();
                for (i3, c3) in spheres.iter().enumerate() {
                    if i3 == i1 {
                        continue;
                    }
                    let dir = unit_direction(c1, c3).unwrap();
                    let kt = dyadic_exponent(dir.dist);
                    let t = 2f64.powi(kt);
                    let along: f64 = e2.iter().zip(&dir.e_full).map(|(a, b)| a * b).sum();
                    let v = (1.0 - along * along).max(0.0).sqrt();
                    if v <= 2.0 * delta / t {
                        *degenerate.entry(kt).or_insert(0) += 1;
                    } else {
                        *sectors.entry((kt, dyadic_exponent(v))).or_insert(0) += 1;
                    }
                }
                let ka = sectors
                    .iter()
                    .map(|(&(kt, kth), &c)| {
                        let (t, theta) = (2f64.powi(kt), 2f64.powi(kth));
                        c as f64 / (theta.powf(nf - 2.0) * (t / delta).powf(nf - 1.0))
                    })
                    .fold(0.0, f64::max);
                let kd = degenerate
                    .iter()
                    .map(|(&kt, &c)| c as f64 / (2f64.powi(kt) / delta))
                    .fold(0.0, f64::max);
                (ka, kd)
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        k_angular = k_angular.max(ka);
        k_degenerate = k_degenerate.max(kd);
    }
    Ok(CardinalityScan {
        delta,
        family_size: count,
        centres_scanned: picks,
        k_distance,
        k_angular,
        k_degenerate,
    })
}
