//! Dyadic distance and angle classes of sphere tuples and the audit that
//! checks they partition all separated tuples.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::family::{regions_containing, union_box, SphereFamily};
use crate::error::{invalid, Result};
use crate::geometry::{centre_distance, unit_direction, RegionKind, Sphere};
use crate::linalg::{gram_wedge_norm, norm, proj_orthocomplement};
use crate::rng::{substream, CHUNK};

/// The power of two `2^k` with `v` in `(2^(k-1), 2^k]`, returned as `k`.
pub fn dyadic_exponent(v: f64) -> i32 {
    assert!(v > 0.0 && v.is_finite(), "dyadic class of {v}");
    let mut k = v.log2().ceil() as i32;
    while v > 2f64.powi(k) {
        k += 1;
    }
    while v <= 2f64.powi(k - 1) {
        k -= 1;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceClass {
    /// `dist` lies in `(t/2, t]`.
    Dyadic(f64),
    /// `dist < 2 delta`.
    Coincident,
}

pub fn distance_bucket(c1: &Sphere, cj: &Sphere, delta: f64) -> DistanceClass {
    let d = centre_distance(c1, cj);
    if d < 2.0 * delta {
        DistanceClass::Coincident
    } else {
        DistanceClass::Dyadic(2f64.powi(dyadic_exponent(d)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngularClass {
    /// The projected length lies in `(theta/2, theta]` and exceeds
    /// `2 delta / t`.
    Dyadic(f64),
    /// Projected length at most `2 delta / t`.
    Degenerate,
    /// Only `C1` is given, so there is no earlier direction to project out;
    /// the tuple is classified by distance alone.
    NotApplicable,
}

fn directions(c1: &Sphere, others: &[&Sphere]) -> Result<Vec<Vec<f64>>> {
    others
        .iter()
        .map(|c| Ok(unit_direction(c1, c)?.e_full))
        .collect()
}

/// Length of the component of `e(C1, Cj)` orthogonal to the directions from
/// `C1` to the later priors.
pub fn angular_projection(priors: &[&Sphere], cj: &Sphere) -> Result<f64> {
    let basis = directions(priors[0], &priors[1..])?;
    let e = unit_direction(priors[0], cj)?.e_full;
    Ok(norm(&proj_orthocomplement(&basis, &e)?))
}

/// Angular class of `cj` given `priors = [C1, .., C_{j-1}]` (as selected by
/// the enumeration of `{1, 2}` and the non-degenerate indices).
pub fn angular_bucket(priors: &[&Sphere], cj: &Sphere, delta: f64, t: f64) -> Result<AngularClass> {
    match priors.len() {
        0 => Err(invalid("angular class needs at least the first sphere")),
        1 => Ok(AngularClass::NotApplicable),
        _ => {
            let v = angular_projection(priors, cj)?;
            if v <= 2.0 * delta / t {
                Ok(AngularClass::Degenerate)
            } else {
                Ok(AngularClass::Dyadic(2f64.powi(dyadic_exponent(v))))
            }
        }
    }
}

/// A dyadic class `(J, t, theta)` of ordered `m`-tuples. Scales are stored
/// as base-2 exponents so signatures compare exactly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BucketSignature {
    pub m: usize,
    /// Tuple positions (1-based, in `3..=m`) with a non-degenerate angle.
    pub j_set: Vec<usize>,
    /// `log2 t_j` for `j = 2..=m`.
    pub t_exp: Vec<i32>,
    /// `log2 theta_j` for `j` in `j_set`, in the same order.
    pub theta_exp: Vec<i32>,
}

impl BucketSignature {
    pub fn t_list(&self) -> Vec<f64> {
        self.t_exp.iter().map(|&k| 2f64.powi(k)).collect()
    }

    pub fn theta_list(&self) -> Vec<f64> {
        self.theta_exp.iter().map(|&k| 2f64.powi(k)).collect()
    }

    /// `theta_j` for every `j = 3..=m`, with `delta / t_j` standing in for
    /// the degenerate positions.
    pub fn theta_or_floor(&self, delta: f64) -> Vec<f64> {
        let t = self.t_list();
        (3..=self.m)
            .map(|j| match self.j_set.iter().position(|&k| k == j) {
                Some(i) => 2f64.powi(self.theta_exp[i]),
                None => delta / t[j - 2],
            })
            .collect()
    }

    /// Compact label such as `J={3};t=2^-2,2^-3;theta=2^-1`.
    pub fn label(&self) -> String {
        let j: Vec<String> = self.j_set.iter().map(|j| j.to_string()).collect();
        let t: Vec<String> = self.t_exp.iter().map(|k| format!("2^{k}")).collect();
        let th: Vec<String> = self.theta_exp.iter().map(|k| format!("2^{k}")).collect();
        format!("J={{{}}};t={};theta={}", j.join(","), t.join(","), th.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TupleClass {
    /// Some pair of centres is closer than `2 delta`.
    Coincident,
    Bucket(BucketSignature),
}

/// Classify an ordered tuple `(C1, .., Cm)`.
pub fn classify_tuple(tuple: &[&Sphere], delta: f64) -> Result<TupleClass> {
    let m = tuple.len();
    if m < 2 {
        return Err(invalid("tuples have at least two spheres"));
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if centre_distance(tuple[i], tuple[j]) < 2.0 * delta {
                return Ok(TupleClass::Coincident);
            }
        }
    }
    let mut sig = BucketSignature {
        m,
        j_set: Vec::new(),
        t_exp: Vec::with_capacity(m - 1),
        theta_exp: Vec::new(),
    };
    for cj in &tuple[1..] {
        sig.t_exp.push(dyadic_exponent(centre_distance(tuple[0], cj)));
    }
    let mut priors: Vec<&Sphere> = vec![tuple[0], tuple[1]];
    for j in 3..=m {
        let t = 2f64.powi(sig.t_exp[j - 2]);
        if let AngularClass::Dyadic(theta) = angular_bucket(&priors, tuple[j - 1], delta, t)? {
            sig.j_set.push(j);
            sig.theta_exp.push(theta.log2().round() as i32);
            priors.push(tuple[j - 1]);
        }
    }
    Ok(TupleClass::Bucket(sig))
}

/// Membership of a tuple in a bucket, evaluated directly from the
/// defining inequalities. Projection lengths are computed as ratios of
/// Gram wedge norms, independently of [`classify_tuple`].
pub fn in_bucket(tuple: &[&Sphere], sig: &BucketSignature, delta: f64) -> bool {
    let m = tuple.len();
    if sig.m != m || sig.t_exp.len() != m - 1 || sig.theta_exp.len() != sig.j_set.len() {
        return false;
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if centre_distance(tuple[i], tuple[j]) < 2.0 * delta {
                return false;
            }
        }
    }
    let t = sig.t_list();
    for j in 2..=m {
        let d = centre_distance(tuple[0], tuple[j - 1]);
        let tj = t[j - 2];
        if !(tj >= delta && tj <= 1.0 && d > 0.5 * tj && d <= tj) {
            return false;
        }
    }
    let e = |k: usize| -> Vec<f64> {
        let a = tuple[0].centre();
        let b = tuple[k - 1].centre();
        let diff: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        let len = norm(&diff);
        diff.into_iter().map(|c| c / len).collect()
    };
    let mut basis = vec![e(2)];
    for j in 3..=m {
        let tj = t[j - 2];
        let base = gram_wedge_norm(&basis);
        let mut with = basis.clone();
        with.push(e(j));
        let v = gram_wedge_norm(&with) / base;
        match sig.j_set.iter().position(|&k| k == j) {
            Some(i) => {
                let theta = 2f64.powi(sig.theta_exp[i]);
                if !(theta >= delta / tj && theta <= 1.0 && v > 0.5 * theta && v <= theta && v > 2.0 * delta / tj) {
                    return false;
                }
                basis.push(e(j));
            }
            None => {
                if v > 2.0 * delta / tj {
                    return false;
                }
            }
        }
    }
    true
}

/// The only signature with non-degenerate set `j_set` that could contain
/// the tuple, or `None` when an angle needed for it vanishes.
fn candidate(tuple: &[&Sphere], j_set: &[usize]) -> Option<BucketSignature> {
    let m = tuple.len();
    let dists: Vec<f64> = tuple[1..].iter().map(|c| centre_distance(tuple[0], c)).collect();
    if dists.contains(&0.0) {
        return None;
    }
    let t_exp = dists.into_iter().map(dyadic_exponent).collect();
    let mut priors = vec![tuple[0], tuple[1]];
    let mut theta_exp = Vec::new();
    for j in 3..=m {
        if j_set.contains(&j) {
            let v = angular_projection(&priors, tuple[j - 1]).ok()?;
            if v == 0.0 {
                return None;
            }
            theta_exp.push(dyadic_exponent(v));
            priors.push(tuple[j - 1]);
        }
    }
    Some(BucketSignature {
        m,
        j_set: j_set.to_vec(),
        t_exp,
        theta_exp,
    })
}

/// Number of buckets containing the tuple, over every choice of `J`.
fn membership_count(tuple: &[&Sphere], delta: f64) -> (u32, Option<BucketSignature>) {
    let m = tuple.len();
    let free: Vec<usize> = (3..=m).collect();
    let mut hits = 0;
    let mut found = None;
    for mask in 0u32..(1 << free.len()) {
        let j_set: Vec<usize> = free
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &j)| j)
            .collect();
        if let Some(sig) = candidate(tuple, &j_set) {
            if in_bucket(tuple, &sig, delta) {
                hits += 1;
                found = Some(sig);
            }
        }
    }
    (hits, found)
}

/// Outcome of classifying every ordered `m`-tuple of a family.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BucketReport {
    pub m: usize,
    /// `N^m`, repeated indices included.
    pub total_tuples: u64,
    pub coincident: u64,
    pub classified: u64,
    /// Tuples the classifier could not place.
    pub unclassified: u64,
    /// Tuples lying in more than one bucket, or in none while separated.
    pub overlap_failures: u64,
    /// Tuples whose classifier output disagrees with direct membership.
    pub mismatches: u64,
    pub buckets: BTreeMap<BucketSignature, u64>,
}

impl BucketReport {
    pub fn partition_ok(&self) -> bool {
        self.unclassified == 0
            && self.overlap_failures == 0
            && self.mismatches == 0
            && self.coincident + self.classified == self.total_tuples
            && self.buckets.values().sum::<u64>() == self.classified
    }

    fn merge(mut self, other: BucketReport) -> BucketReport {
        self.total_tuples += other.total_tuples;
        self.coincident += other.coincident;
        self.classified += other.classified;
        self.unclassified += other.unclassified;
        self.overlap_failures += other.overlap_failures;
        self.mismatches += other.mismatches;
        for (k, v) in other.buckets {
            *self.buckets.entry(k).or_insert(0) += v;
        }
        self
    }
}

/// Advance an odometer over `[0, n)^len`; false once it wraps.
fn next_tuple(idx: &mut [usize], n: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Classify all ordered `m`-tuples of `family` and check, tuple by tuple,
/// that the buckets are disjoint and cover every separated tuple.
pub fn bucket_audit(family: &SphereFamily, m: usize) -> Result<BucketReport> {
    if m < 2 || m > family.n() {
        return Err(invalid(format!("tuple length {m} must lie in [2, n = {}]", family.n())));
    }
    let spheres = family.spheres();
    let n = spheres.len();
    let delta = family.delta();
    let report = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut rep = BucketReport {
                m,
                ..Default::default()
            };
            let mut rest = vec![0usize; m - 1];
            loop {
                let tuple: Vec<&Sphere> = std::iter::once(first)
                    .chain(rest.iter().copied())
                    .map(|i| &spheres[i])
                    .collect();
                rep.total_tuples += 1;
                let (hits, member) = membership_count(&tuple, delta);
                match classify_tuple(&tuple, delta) {
                    Ok(TupleClass::Coincident) => {
                        rep.coincident += 1;
                        if hits != 0 {
                            rep.overlap_failures += 1;
                        }
                    }
                    Ok(TupleClass::Bucket(sig)) => {
                        rep.classified += 1;
                        if hits != 1 {
                            rep.overlap_failures += 1;
                        } else if member.as_ref() != Some(&sig) {
                            rep.mismatches += 1;
                        }
                        *rep.buckets.entry(sig).or_insert(0) += 1;
                    }
                    Err(_) => rep.unclassified += 1,
                }
                if !next_tuple(&mut rest, n) {
                    break;
                }
            }
            rep
        })
        .reduce(
            || BucketReport {
                m,
                ..Default::default()
            },
            BucketReport::merge,
        );
    Ok(BucketReport { m, ..report })
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub(crate) fn from_sums(volume: f64, s1: u128, s2: u128, samples: u64) -> Estimate {
        let n = samples as f64;
        let mean = s1 as f64 / n;
        let var = (s2 as f64 / n - mean * mean).max(0.0);
        Estimate {
            value: volume * mean,
            std_error: volume * (var / n).sqrt(),
        }
    }
}

/// Sums of `|C1* ∩ .. ∩ Cm*|` over the tuples of each class.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketVolumes {
    pub coincident: Estimate,
    pub separated: Estimate,
    pub per_bucket: BTreeMap<BucketSignature, Estimate>,
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Coincident,
    Separated,
    Bucket(BucketSignature),
}

/// Pointwise Monte Carlo over the union of the polar caps: at each sample
/// every ordered `m`-tuple of caps containing the point is classified and
/// credited to its class.
pub fn bucket_volume_audit(family: &SphereFamily, m: usize, samples: u64, seed: u64) -> Result<BucketVolumes> {
    if samples == 0 {
        return Err(crate::error::Error::ZeroSamples);
    }
    if m < 2 || m > family.n() {
        return Err(invalid(format!("tuple length {m} must lie in [2, n = {}]", family.n())));
    }
    let regions = family.regions(RegionKind::PolarCap);
    let empty = BucketVolumes {
        coincident: Estimate::default(),
        separated: Estimate::default(),
        per_bucket: BTreeMap::new(),
        samples,
    };
    let Some(bbox) = union_box(&regions) else {
        return Ok(empty);
    };
    let spheres = family.spheres();
    let delta = family.delta();
    let dim = family.n();
    let chunks = samples.div_ceil(CHUNK);
    let sums: BTreeMap<Key, (u128, u128)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, &[k]);
            let mut y = vec![0.0; dim];
            let mut inside = Vec::new();
            let mut acc: BTreeMap<Key, (u128, u128)> = BTreeMap::new();
            let mut local: BTreeMap<Key, u64> = BTreeMap::new();
            for _ in 0..CHUNK.min(samples - k * CHUNK) {
                bbox.sample_into(&mut rng, &mut y);
                regions_containing(&regions, &y, &mut inside);
                if inside.is_empty() {
                    continue;
                }
                local.clear();
                let mut idx = vec![0usize; m];
                loop {
                    let tuple: Vec<&Sphere> = idx.iter().map(|&i| &spheres[inside[i]]).collect();
                    let key = match classify_tuple(&tuple, delta) {
                        Ok(TupleClass::Bucket(sig)) => {
                            *local.entry(Key::Separated).or_insert(0) += 1;
                            Key::Bucket(sig)
                        }
                        _ => Key::Coincident,
                    };
                    *local.entry(key).or_insert(0) += 1;
                    if !next_tuple(&mut idx, inside.len()) {
                        break;
                    }
                }
                for (key, &c) in &local {
                    let e = acc.entry(key.clone()).or_insert((0, 0));
                    e.0 += c as u128;
                    e.1 += (c as u128) * (c as u128);
                }
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, (s1, s2)) in b {
                let e = a.entry(k).or_insert((0, 0));
                e.0 += s1;
                e.1 += s2;
            }
            a
        });
    let volume = bbox.volume();
    let mut out = empty;
    for (key, (s1, s2)) in &sums {
        let est = Estimate::from_sums(volume, *s1, *s2, samples);
        match key {
            Key::Coincident => out.coincident = est,
            Key::Separated => out.separated = est,
            Key::Bucket(sig) => {
                out.per_bucket.insert(sig.clone(), est);
            }
        }
    }
    Ok(out)
}
